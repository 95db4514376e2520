import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { Envelope } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

// Recorded live responses from the posteriorlab service; tests replay these
// instead of talking to a server.
export function fixture<T>(name: string): Envelope<T> {
  const raw = readFileSync(join(here, "fixtures", `${name}.json`), "utf-8");
  return JSON.parse(raw) as Envelope<T>;
}
