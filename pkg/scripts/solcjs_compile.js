// usage: node solcjs_compile.js <solc-module-dir> <file.sol>
// prints {"version": ..., "contracts": {Name: runtimeHex}, "errors": [...]}
const path = require("path");
const fs = require("fs");
const solc = require(path.resolve(process.argv[2]));
const file = process.argv[3];
const source = fs.readFileSync(file, "utf8");
const out = solc.compile({ sources: { [path.basename(file)]: source } }, 0);
const contracts = {};
for (const key of Object.keys(out.contracts || {})) {
  contracts[key.split(":").pop()] = out.contracts[key].runtimeBytecode;
}
const errors = (out.errors || []).filter((e) => !/Warning:/.test(e));
process.stdout.write(JSON.stringify({ version: solc.version(), contracts, errors }));
