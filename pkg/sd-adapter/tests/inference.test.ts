import assert from "node:assert/strict";
import { test } from "node:test";
import { readdir, rm } from "node:fs/promises";
import { join } from "node:path";

import {
  INFERENCE_DEFAULTS,
  makeJob,
  promptFor,
  runInference,
  stubGenerator,
  unavailableGenerator,
  type Generator,
} from "../src/inference.js";
import { makeTempDir } from "./helpers.js";

test("inference defaults match the documented settings", () => {
  assert.equal(INFERENCE_DEFAULTS.denoisingSteps, 50);
  assert.equal(INFERENCE_DEFAULTS.guidanceScale, 7.5);
  assert.deepEqual(INFERENCE_DEFAULTS.seeds, Array.from({ length: 20 }, (_, k) => k));
  assert.equal(INFERENCE_DEFAULTS.perClassTarget, 200);
  assert.equal(promptFor("helicopter"), "birdview of helicopter");
});

test("stub inference writes the pool layout", async () => {
  const root = await makeTempDir();
  const job = makeJob(["plane", "ship"], join(root, "pool"), 25);
  const result = await runInference(job, stubGenerator);
  assert.equal(result.generated, 50);
  assert.equal(result.skipped, 0);

  const planeFiles = await readdir(join(root, "pool", "plane"));
  assert.equal(planeFiles.length, 25);
  for (const file of planeFiles) {
    assert.match(file, /^seed\d+_\d+\.png$/);
  }
  // 25 samples over 20 seeds: seeds 0..19 at index 0, then 0..4 at index 1.
  assert.ok(planeFiles.includes("seed0_0.png"));
  assert.ok(planeFiles.includes("seed19_0.png"));
  assert.ok(planeFiles.includes("seed4_1.png"));
  await rm(root, { recursive: true });
});

test("rerun skips existing files (resumable)", async () => {
  const root = await makeTempDir();
  const job = makeJob(["plane"], join(root, "pool"), 10);
  await runInference(job, stubGenerator);

  let calls = 0;
  const counting: Generator = async (prompt, seed, index) => {
    calls += 1;
    return stubGenerator(prompt, seed, index);
  };
  const second = await runInference(job, counting);
  assert.equal(calls, 0);
  assert.equal(second.generated, 0);
  assert.equal(second.skipped, 10);
  await rm(root, { recursive: true });
});

test("interrupted run leaves a partial pool that completes on rerun", async () => {
  const root = await makeTempDir();
  const job = makeJob(["plane"], join(root, "pool"), 8);
  let produced = 0;
  const flaky: Generator = async (prompt, seed, index) => {
    if (produced >= 5) throw new Error("simulated crash");
    produced += 1;
    return stubGenerator(prompt, seed, index);
  };
  await assert.rejects(runInference(job, flaky), /simulated crash/);
  const partial = await readdir(join(root, "pool", "plane"));
  assert.equal(partial.length, 5);
  assert.ok(partial.every((f) => !f.includes(".tmp")));

  const result = await runInference(job, stubGenerator);
  assert.equal(result.generated, 3);
  assert.equal(result.skipped, 5);
  assert.equal((await readdir(join(root, "pool", "plane"))).length, 8);
  await rm(root, { recursive: true });
});

test("stub generator is deterministic", async () => {
  const a = await stubGenerator("birdview of plane", 3, 1);
  const b = await stubGenerator("birdview of plane", 3, 1);
  assert.deepEqual(Buffer.from(a), Buffer.from(b));
  const c = await stubGenerator("birdview of plane", 4, 1);
  assert.notDeepEqual(Buffer.from(a), Buffer.from(c));
});

test("default generator refuses with an actionable message", async () => {
  await assert.rejects(unavailableGenerator("birdview of plane", 0, 0), /no diffusion runtime/);
});

test("job validation", () => {
  assert.throws(() => makeJob([], "/pool"), /no classes/);
  assert.throws(() => makeJob(["plane"], "/pool", 0), /perClassTarget/);
});
