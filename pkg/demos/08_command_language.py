"""The text command language that stands in for spoken control: parsing,
canonical printing, suggestions and deictic handling.

Run: python demos/08_command_language.py
"""

from edakit import CommandError, parse_command, print_command

SENTENCES = [
    "Apply agglomerative clustering with 4 clusters to solution 1",
    "Show projection view on screen number 13",
    "Try increasing the steps value of this data point by 5",
    "load distribution view on screens 7 and 8",
    "extend feature selection view to three screens",
    'filter solution 2 where age >= 30 and gender == "F"',
    "apply cmds projection in 3 dimensions with cosine metric to solution 0",
]

for text in SENTENCES:
    cmd = parse_command(text)
    print(f"  {text!r}")
    print(f"    -> {cmd}")
    print(f"    canonical: {print_command(cmd)!r}")

print("\nmistyped algorithm names get suggestions:")
try:
    parse_command("apply kmaens clustering with 3 clusters to solution 0")
except CommandError as exc:
    print(f"  {exc} (suggestions: {exc.suggestions})")

print("\nscreen deixis needs a number (gaze context is not part of the engine):")
try:
    parse_command("show projection view on that screen")
except CommandError as exc:
    print(f"  {exc}")

print("\nsyntax errors carry byte offsets:")
try:
    parse_command("show projection view on screen number")
except CommandError as exc:
    print(f"  offset {exc.offset}: {exc}")
