# run_stemrank.py
import os
import re
import sys
import logging
import argparse
from typing import Any, Callable, Dict, List, Optional
from dotenv import load_dotenv

# --- STEP 1: Configure environment and path ---
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), 'src')))
load_dotenv()

log = logging.getLogger("stemrank_runner")

# --- STEP 2: Import main logic ---
from commands import register_commands
from core.config import LOG_LEVEL


# --- STEP 3: Registry the commands attach themselves to ---
class CommandRegistry:
    def __init__(self):
        self.commands: Dict[str, Callable[..., Dict[str, Any]]] = {}

    def command(self, name: Optional[str] = None):
        def decorator(func):
            self.commands[name or func.__name__.replace("_", "-")] = func
            return func
        return decorator


# Options whose values may start with a minus sign ("-1,1", "-3..3").
SIGNED_OPTIONS = ("--alpha", "--range")
_SIGNED_VALUE = re.compile(r"^-\d")


def glue_signed_values(argv: List[str]) -> List[str]:
    """Rewrite `--alpha -1,1` as `--alpha=-1,1` so argparse does not read the value as a flag."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in SIGNED_OPTIONS and i + 1 < len(argv) and _SIGNED_VALUE.match(argv[i + 1]):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stemrank",
        description="Ranks of RO(G)-graded rational stable stems of finite groups",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at INFO level on stderr.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_group(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("group", help='Catalog name (C2, Q8, D6, Sym(3), C2xC2), JSON spec or spec file')
        p.add_argument("--no-cache", action="store_true", help="Neither read nor write the result cache.")
        return p

    p = sub.add_parser("groups", help="List the catalog families.")
    p.add_argument("action", choices=["list"])

    p = with_group("analyze", "Dimension vectors, orientation data and lattices per subgroup class.")
    p.add_argument("--format", dest="fmt", choices=["text", "json", "tex"], default="text")

    p = with_group("rank", "Rank r_alpha at one virtual representation.")
    p.add_argument("--alpha", required=True, help="a1,a2,... or named coordinates like sigma=1,phi_1=-2; a leading minus is fine (--alpha -1,1).")
    p.add_argument("--json", dest="as_json", action="store_true", help="Emit the result as JSON.")

    p = with_group("strata", "Distinct intersections of the N_H^+ lattices.")
    p.add_argument("--format", dest="fmt", choices=["text", "json"], default="text")

    p = with_group("slice", "Ranks on a 2-D slice of RO(G).")
    p.add_argument("--axes", required=True, help="Two axes i,j as 1-based indices or irrep names.")
    p.add_argument("--fix", action="append", default=[], help="Fix another coordinate, k=v (repeatable).")
    p.add_argument("--range", dest="window", default="-10..10", help="Inclusive box lo..hi, e.g. --range -4..4.")
    p.add_argument("--out", choices=["tsv", "svg"], default="tsv")

    p = with_group("mackey-rank", "Rank with Mackey coefficients.")
    p.add_argument("--alpha", required=True, help="Same forms as rank --alpha.")
    p.add_argument("--coeff", default="burnside", help='Coefficient JSON file, or "burnside" / "zero".')

    p = with_group("verify", "Check published lattice lists against the computation.")
    p.add_argument("--claims", default=None, help="Claims JSON (defaults to the bundled file for the group).")
    p.add_argument("--format", dest="fmt", choices=["text", "json"], default="text")

    p = with_group("profile", "Histogram of ranks over an integer box.")
    p.add_argument("--range", dest="window", default="-2..2", help="Inclusive box lo..hi, e.g. --range -3..3.")

    p = sub.add_parser("export-table", help="Print the verified character table as JSON.")
    p.add_argument("group")

    p = sub.add_parser("import-table", help="Verify a character table JSON and store it in the cache.")
    p.add_argument("path")
    p.add_argument("--no-cache", action="store_true")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(glue_signed_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as e:
        return int(e.code or 0)

    level = logging.INFO if args.verbose else getattr(logging, LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s", stream=sys.stderr)

    registry = CommandRegistry()
    register_commands(registry)
    kwargs = {k: v for k, v in vars(args).items() if k not in ("command", "verbose", "action")}
    name = "groups-list" if args.command == "groups" else args.command

    try:
        result = registry.commands[name](**kwargs)
    except Exception:
        log.error("❌ Command failed with an unexpected exception.", exc_info=True)
        return 1

    if result.get("ok"):
        output = result.get("output", "")
        sys.stdout.write(output if output.endswith("\n") else output + "\n")
    else:
        print(f"error: {result.get('error')}", file=sys.stderr)
    return int(result.get("exit_code", 0 if result.get("ok") else 1))


if __name__ == "__main__":
    sys.exit(main())
