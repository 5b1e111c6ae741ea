/**
 * Prompt manifest reader.
 *
 * The manifest is JSON Lines, one object per retained crop with keys
 * crop_id, path, prompt, class. Paths may be relative to the manifest's own
 * directory (the pipeline writes them that way so manifests stay portable).
 */

import { readFile } from "node:fs/promises";
import { dirname, isAbsolute, resolve } from "node:path";

export interface ManifestEntry {
  cropId: string;
  /** Absolute path to the crop image, resolved against the manifest dir. */
  path: string;
  prompt: string;
  className: string;
}

export async function readManifest(manifestPath: string): Promise<ManifestEntry[]> {
  const text = await readFile(manifestPath, "utf-8");
  const base = dirname(resolve(manifestPath));
  const entries: ManifestEntry[] = [];
  const seen = new Set<string>();
  for (const [index, raw] of text.split("\n").entries()) {
    const line = raw.trim();
    if (!line) continue;
    let parsed: Record<string, unknown>;
    try {
      parsed = JSON.parse(line);
    } catch (err) {
      throw new Error(`manifest line ${index + 1}: invalid JSON (${(err as Error).message})`);
    }
    for (const key of ["crop_id", "path", "prompt", "class"]) {
      if (typeof parsed[key] !== "string" || parsed[key] === "") {
        throw new Error(`manifest line ${index + 1}: missing or empty key "${key}"`);
      }
    }
    const cropId = parsed["crop_id"] as string;
    if (seen.has(cropId)) {
      throw new Error(`manifest line ${index + 1}: duplicate crop_id "${cropId}"`);
    }
    seen.add(cropId);
    const storedPath = parsed["path"] as string;
    entries.push({
      cropId,
      path: isAbsolute(storedPath) ? storedPath : resolve(base, storedPath),
      prompt: parsed["prompt"] as string,
      className: parsed["class"] as string,
    });
  }
  return entries;
}

/** Distinct class names, sorted, in "birdview of <class>" prompt order. */
export function manifestClasses(entries: ManifestEntry[]): string[] {
  return [...new Set(entries.map((e) => e.className))].sort();
}
