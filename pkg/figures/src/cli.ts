/** Command-line entry: one subcommand per figure kind.
 *
 *   spinbattery-figures heatmap  --input trajectory.csv --config effective_config.json --out fig.svg [--field z|q|both]
 *   spinbattery-figures traces   --input trajectory.csv --config effective_config.json --out fig.svg [--normalize-time]
 *   spinbattery-figures scaling  --input regime_diagram.json --out fig.svg
 *   spinbattery-figures regime   --input regime_diagram.json --out fig.svg
 *   spinbattery-figures fidelity --input fidelity.csv [--input more.csv] --config fidelity.json --out fig.svg
 *
 * Inputs are the documented spinbattery artifact schemas; any mismatch is a
 * descriptive failure with a nonzero exit.  The generating config hash is
 * taken from the JSON input (config_sha256) and embedded in the SVG.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { parseFidelity, parseTrajectory } from "./csv.js";
import { renderFidelity } from "./figures/fidelity.js";
import { renderHeatmap } from "./figures/heatmap.js";
import { renderRegime } from "./figures/regime.js";
import { RegimeDiagram, renderScaling } from "./figures/scaling.js";
import { renderTraces } from "./figures/traces.js";

interface Args {
  kind: string;
  inputs: string[];
  config?: string;
  out?: string;
  field?: string;
  normalizeTime: boolean;
}

export function parseArgs(argv: string[]): Args {
  if (argv.length === 0) {
    throw new Error("usage: spinbattery-figures <heatmap|traces|scaling|regime|fidelity> --input ... --out ...");
  }
  const args: Args = { kind: argv[0], inputs: [], normalizeTime: false };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const need = () => {
      if (i + 1 >= argv.length) throw new Error(`${flag}: missing value`);
      return argv[++i];
    };
    switch (flag) {
      case "--input": args.inputs.push(need()); break;
      case "--config": args.config = need(); break;
      case "--out": args.out = need(); break;
      case "--field": args.field = need(); break;
      case "--normalize-time": args.normalizeTime = true; break;
      default: throw new Error(`unknown flag ${flag}`);
    }
  }
  if (args.inputs.length === 0) throw new Error("--input is required");
  if (!args.out) throw new Error("--out is required");
  return args;
}

function readJson(path: string): Record<string, unknown> {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(path, "utf-8"));
  } catch (exc) {
    throw new Error(`${path}: not valid JSON (${(exc as Error).message})`);
  }
  if (typeof doc !== "object" || doc === null) {
    throw new Error(`${path}: expected a JSON object`);
  }
  return doc as Record<string, unknown>;
}

function hashFrom(doc: Record<string, unknown>, path: string): string {
  const sha = doc["config_sha256"];
  if (typeof sha !== "string" || sha.length < 8) {
    throw new Error(`${path}: missing config_sha256 field`);
  }
  return sha;
}

export function renderFromArgs(args: Args): string {
  switch (args.kind) {
    case "heatmap": {
      if (!args.config) throw new Error("heatmap needs --config (effective_config.json)");
      const traj = parseTrajectory(readFileSync(args.inputs[0], "utf-8"));
      const cfg = readJson(args.config);
      const field = (args.field ?? "both") as "z" | "q" | "both";
      if (!["z", "q", "both"].includes(field)) {
        throw new Error(`--field must be z, q or both, got ${field}`);
      }
      return renderHeatmap({ traj, configHash: hashFrom(cfg, args.config), field });
    }
    case "traces": {
      if (!args.config) throw new Error("traces needs --config (effective_config.json)");
      const traj = parseTrajectory(readFileSync(args.inputs[0], "utf-8"));
      const cfg = readJson(args.config);
      const leadSites = Number(cfg["N_b"]);
      const n = Number(cfg["N"]);
      const j = Number(cfg["J"] ?? 1.0);
      if (!Number.isInteger(leadSites) || leadSites < 1) {
        throw new Error(`${args.config}: N_b missing or invalid`);
      }
      return renderTraces({
        traj,
        configHash: hashFrom(cfg, args.config),
        leadSites,
        tau1: typeof cfg["tau1"] === "number" ? (cfg["tau1"] as number) : undefined,
        tau2: typeof cfg["tau2"] === "number" ? (cfg["tau2"] as number) : undefined,
        normalizeBy: args.normalizeTime ? n / j : 1.0,
      });
    }
    case "scaling": {
      const agg = readJson(args.inputs[0]) as unknown as RegimeDiagram;
      hashFrom(agg as unknown as Record<string, unknown>, args.inputs[0]);
      if (!Array.isArray(agg.fits)) throw new Error(`${args.inputs[0]}: no fits array`);
      return renderScaling(agg);
    }
    case "regime": {
      const agg = readJson(args.inputs[0]) as unknown as RegimeDiagram;
      hashFrom(agg as unknown as Record<string, unknown>, args.inputs[0]);
      if (!Array.isArray(agg.points)) throw new Error(`${args.inputs[0]}: no points array`);
      return renderRegime(agg);
    }
    case "fidelity": {
      if (!args.config) throw new Error("fidelity needs --config (fidelity.json)");
      const cfg = readJson(args.config);
      const series = args.inputs.map((path) => ({
        label: basename(path).replace(/\.csv$/, ""),
        data: parseFidelity(readFileSync(path, "utf-8")),
      }));
      const windows = cfg["windows"] as Record<string, unknown> | undefined;
      return renderFidelity({
        series,
        configHash: hashFrom(cfg, args.config),
        tau2: typeof windows?.["tau2"] === "number" ? (windows["tau2"] as number) : undefined,
      });
    }
    default:
      throw new Error(`unknown figure kind ${JSON.stringify(args.kind)}`);
  }
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const svg = renderFromArgs(args);
    writeFileSync(args.out!, svg);
    process.stdout.write(`${args.out}\n`);
    return 0;
  } catch (exc) {
    process.stderr.write(`error: ${(exc as Error).message}\n`);
    return 1;
  }
}

// invoked directly (not under vitest)
if (process.argv[1] && /cli\.(js|ts)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
