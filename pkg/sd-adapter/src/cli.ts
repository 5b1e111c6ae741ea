/**
 * sd-adapter CLI.
 *
 *   emit-config --manifest m.jsonl --output config.json [--adapter out.safetensors]
 *   infer       --manifest m.jsonl --pool-root pool/ [--per-class 200] [--stub]
 *
 * `infer` with --stub fills the pool with deterministic placeholder images;
 * without it, a real diffusion generator must be wired in (not bundled).
 */

import { parseArgs } from "node:util";

import { emitFinetuneConfig } from "./finetuneConfig.js";
import { makeJob, runInference, stubGenerator, unavailableGenerator } from "./inference.js";
import { manifestClasses, readManifest } from "./manifest.js";

function usage(message?: string): never {
  if (message) console.error(`error: ${message}`);
  console.error(
    "usage: sd-adapter <emit-config|infer> --manifest <jsonl> " +
      "[--output <json>] [--adapter <path>] [--pool-root <dir>] [--per-class <n>] [--stub]",
  );
  process.exit(2);
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (!command) usage("missing command");

  const { values } = parseArgs({
    args: rest,
    options: {
      manifest: { type: "string" },
      output: { type: "string" },
      adapter: { type: "string" },
      "pool-root": { type: "string" },
      "per-class": { type: "string" },
      stub: { type: "boolean", default: false },
    },
  });

  if (!values.manifest) usage("--manifest is required");

  if (command === "emit-config") {
    if (!values.output) usage("emit-config requires --output");
    const config = await emitFinetuneConfig(
      values.manifest,
      values.output,
      values.adapter ?? "lora_adapter.safetensors",
    );
    console.error(`wrote ${values.output} with ${config.pairs.length} pairs`);
    return 0;
  }

  if (command === "infer") {
    if (!values["pool-root"]) usage("infer requires --pool-root");
    const entries = await readManifest(values.manifest);
    const perClass = values["per-class"] ? Number.parseInt(values["per-class"], 10) : 200;
    const job = makeJob(manifestClasses(entries), values["pool-root"], perClass);
    const generator = values.stub ? stubGenerator : unavailableGenerator;
    const result = await runInference(job, generator);
    console.error(
      `pool at ${job.poolRoot}: ${result.generated} generated, ${result.skipped} skipped ` +
        `(${job.classNames.length} classes x ${job.perClassTarget})`,
    );
    return 0;
  }

  usage(`unknown command: ${command}`);
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  });
