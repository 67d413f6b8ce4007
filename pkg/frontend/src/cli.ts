#!/usr/bin/env node
/**
 * plot --kind <figure> --task <id> --in <dir> --out <path.svg>
 *
 * Optional: --level 0.95, --metric mmd_weight|mmd_function|ksd,
 * --space weight|function, --algorithm <name>, --hp-index <n>.
 */

import { writeFileSync } from "fs";
import { pathToFileURL } from "url";
import { SchemaError } from "./csv.js";
import { defaultOptions, FIGURE_KINDS, renderFigure } from "./figures.js";

function usage(): never {
  console.error(
    "usage: bnnbench-plot --kind <" +
      FIGURE_KINDS.join("|") +
      "> --task <id> --in <dir> --out <path.svg>\n" +
      "       [--level 0.95] [--metric mmd_weight|mmd_function|ksd]\n" +
      "       [--space weight|function] [--algorithm <name>] [--hp-index <n>]"
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) usage();
    args.set(flag.slice(2), argv[i + 1]);
  }
  const kind = args.get("kind");
  const task = args.get("task");
  const dir = args.get("in");
  const out = args.get("out");
  if (!kind || !task || !dir || !out) usage();

  const opts = defaultOptions(dir, task);
  if (args.has("level")) {
    const level = Number(args.get("level"));
    if (!(level > 0 && level < 1)) {
      console.error(`--level must be in (0, 1), got ${args.get("level")}`);
      return 2;
    }
    opts.level = level;
  }
  if (args.has("metric")) opts.metric = args.get("metric")!;
  if (args.has("space")) opts.space = args.get("space")!;
  if (args.has("algorithm")) opts.algorithm = args.get("algorithm");
  if (args.has("hp-index")) {
    const hp = Number(args.get("hp-index"));
    if (!Number.isInteger(hp) || hp < 0) {
      console.error(`--hp-index must be a non-negative integer, got ${args.get("hp-index")}`);
      return 2;
    }
    opts.hpIndex = hp;
  }

  try {
    const svg = renderFigure(kind, opts);
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(err.message);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
