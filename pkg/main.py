import argparse
import asyncio
import json
import sys
from typing import Any, Dict, List, Optional

from app.exceptions import InputError
from app.logger import define_log_level, logger
from app.tool import (
    AnalyzeTool,
    AverageTool,
    GenericityTool,
    PredictTool,
    ResolventTool,
    SimulateTool,
    ToolCollection,
    ToolResult,
)


TOOLS = ToolCollection(
    AnalyzeTool(), AverageTool(), ResolventTool(), PredictTool(), GenericityTool(), SimulateTool()
)


def parse_overrides(items: Optional[List[str]]) -> Dict[str, Any]:
    """`section.key=value` pairs; values are read as JSON when possible."""
    overrides: Dict[str, Any] = {}
    for item in items or []:
        key, sep, raw = item.partition("=")
        if not sep or "." not in key:
            raise InputError(f"Bad --tol '{item}', expected section.key=value")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        overrides[key.strip()] = value
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glance",
        description="Glancing geometry and damped-wave decay rates on the flat torus",
    )
    parser.add_argument("--log-level", default=None, help="Console log level")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Output directory")
    common.add_argument("--seed", type=int, help="Seed for stochastic checks")
    common.add_argument(
        "--tol", action="append", metavar="SECTION.KEY=VALUE", help="Configuration override (repeatable)"
    )

    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        name: sub.add_parser(
            name,
            parents=[common],
            help=TOOLS.get_tool(name).summary,
            description=TOOLS.get_tool(name).description,
        )
        for name in TOOLS.names
    }
    for name in ("analyze", "predict", "genericity", "average"):
        commands[name].add_argument("--scene", required=True)
    commands["predict"].add_argument("--betas", type=float, nargs="+", help="Tabulate alpha for cases A/B/C")
    commands["genericity"].add_argument("--mode", choices=["polygon", "curve"])
    commands["average"].add_argument("--direction", default="1,0", help="Direction p,q")

    resolvent = commands["resolvent"]
    resolvent.add_argument(
        "--family", choices=["constant", "point", "interval", "profile"], default="point"
    )
    resolvent.add_argument("--exponent", type=float, default=2.0, help="gamma or beta of the fixture")
    resolvent.add_argument("--scene", help="Scene for the profile family")
    resolvent.add_argument("--direction", default="1,0")
    resolvent.add_argument("--lambda-min", type=float)
    resolvent.add_argument("--lambda-max", type=float)
    resolvent.add_argument("--lambda-points", type=int)
    resolvent.add_argument("--trials", type=int, default=100, help="Random pairing checks")

    simulate = commands["simulate"]
    simulate.add_argument("--scene", dest="scenes", action="append", default=[], help="Repeatable")
    simulate.add_argument("--final-time", type=float)
    simulate.add_argument("--grid-size", type=int)
    simulate.add_argument("--direction", default="1,0", help="Beam direction p,q")
    simulate.add_argument("--beam-offset", type=float)
    simulate.add_argument("--undamped", action="store_true", help="Add a W = 0 reference run")
    simulate.add_argument(
        "--damped-direction", help="Also launch a beam p,q through the deepest damping and compare"
    )
    return parser


async def run(argv: Optional[List[str]] = None) -> ToolResult:
    args = build_parser().parse_args(argv)
    if args.log_level:
        define_log_level(print_level=args.log_level.upper(), name="glance")
    tool_input = {k: v for k, v in vars(args).items() if k not in ("command", "log_level", "tol")}
    with logger.contextualize(command=args.command):
        try:
            tool_input["tol"] = parse_overrides(args.tol)
        except InputError as e:
            return TOOLS.get_tool(args.command).fail_response(e.message, e.exit_code)
        logger.info(f"Running {args.command}")
        return await TOOLS.execute(name=args.command, tool_input=tool_input)


def main(argv: Optional[List[str]] = None) -> int:
    result = asyncio.run(run(argv))
    if result.error:
        print(f"Error: {result.error}", file=sys.stderr)
    elif result.output:
        print(result.output)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
