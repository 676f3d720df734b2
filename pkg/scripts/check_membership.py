"""Classify rate vectors read one per line (comma separated) from stdin or the arguments.

    python scripts/check_membership.py 0.25,0.2 1/16,9/16 0.25,1/3
"""
import sys

from aloha_region.cli import parse_rates
from aloha_region.membership import classify


def main():
    lines = sys.argv[1:] or [ln for ln in sys.stdin.read().splitlines() if ln.strip()]
    for text in lines:
        r = classify(parse_rates(text))
        roots = ", ".join(f"{d:.9g}" for d in r.roots)
        print(f"{text:<24} {r.cls.value:<9} roots [{roots}]")


if __name__ == "__main__":
    main()
