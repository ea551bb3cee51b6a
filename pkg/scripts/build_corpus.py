#!/usr/bin/env python3
"""Compile the Solidity corpus under corpus/ to runtime bytecode.

Requires node plus npm-installed solc-js packages; point SOLCJS_0425 and
SOLCJS_0411 at their ``node_modules/solc`` directories. Output: one
``<Name>.hex`` next to every ``<Name>.sol`` and ``corpus/manifest.json``.
"""
import argparse
import hashlib
import json
import os
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
HELPER = Path(__file__).resolve().parent / "solcjs_compile.js"

# Technique label per honeypot; mutants and synthetic contracts carry their
# expected detector set explicitly.
LABELS = {
    "honeypots/MultiplicatorX3": ["BD"],
    "honeypots/KingOfTheHill": ["ID"],
    "honeypots/DividendDistributorv3": ["SESL"],
    "honeypots/For_Test": ["TDO"],
    "honeypots/GuessNumber": ["US"],
    "honeypots/Gift_1_ETH": ["HSU"],
    "honeypots/TestToken": ["HT"],
    "honeypots/Private_Bank": ["SMC"],
    "synthetic/StrawManDelegate": ["SMC"],
}

# The skip-empty-string-literal encoder bug was fixed in 0.4.12, so the SESL
# pair is built with the last affected release.
COMPILER_OVERRIDES = {
    "honeypots/DividendDistributorv3": "0.4.11",
    "mutants/DividendDistributorv3_Fixed": "0.4.11",
}

NOT_CASHFLOW = {"synthetic/PayableFallback", "synthetic/NonPayable", "synthetic/TwoFunctions"}


def compile_file(sol: Path, solc_dir: str) -> tuple[str, str]:
    proc = subprocess.run(
        ["node", str(HELPER), solc_dir, str(sol)],
        check=True, capture_output=True, text=True,
    )
    result = json.loads(proc.stdout)
    if result["errors"]:
        raise RuntimeError(f"{sol}: {result['errors']}")
    return result["version"], result["contracts"][sol.stem]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--solc-0425", default=os.environ.get("SOLCJS_0425", "/root/tools/solc/node_modules/solc"))
    parser.add_argument("--solc-0411", default=os.environ.get("SOLCJS_0411", "/root/tools/solc0411/node_modules/solc"))
    args = parser.parse_args()
    compilers = {"0.4.25": args.solc_0425, "0.4.11": args.solc_0411}

    entries = []
    for sol in sorted(CORPUS.glob("*/*.sol")):
        key = f"{sol.parent.name}/{sol.stem}"
        wanted = COMPILER_OVERRIDES.get(key, "0.4.25")
        version, runtime = compile_file(sol, compilers[wanted])
        sol.with_suffix(".hex").write_text(runtime + "\n")
        entries.append({
            "name": sol.stem,
            "group": sol.parent.name,
            "path": f"{key}.hex",
            "compiler": version,
            "expected": LABELS.get(key, []),
            "cashflow": key not in NOT_CASHFLOW,
            "source_sha256": hashlib.sha256(sol.read_bytes()).hexdigest(),
        })
        print(f"{key:45s} {version:40s} {len(runtime) // 2:6d} bytes")
    (CORPUS / "manifest.json").write_text(json.dumps({"contracts": entries}, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
