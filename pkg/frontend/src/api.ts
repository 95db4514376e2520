// Typed client for the posteriorlab HTTP API. Every response arrives in an
// {ok, result, error} envelope; all posterior math happens server-side.

export interface ApiError {
  code: string;
  message: string;
}

export interface Envelope<T> {
  ok: boolean;
  result: T | null;
  error: ApiError | null;
}

export interface BayesTableJson {
  values: number[];
  prior: number[];
  likelihood: number[];
  product: number[];
  posterior: number[];
}

export interface DiscreteUpdateResult {
  table: BayesTableJson;
}

export interface CredibleResult {
  values: number[];
  coverage: number;
}

export interface BetaFitResult {
  a: number;
  b: number;
  intervals: { central50: [number, number]; central90: [number, number] };
  density: { grid: number[]; pdf: number[] };
}

export interface WalkStepResult {
  candidate: number;
  R: number;
  accepted: boolean;
  next: number;
  seed: number;
  coin: "heads" | "tails";
  u: number;
}

export interface WalkRunResult {
  path: number[];
  frequencies: number[];
  seed: number;
}

export type LikelihoodSpec =
  | { kind: "binomial"; data: { y: number; n: number } }
  | { kind: "poisson"; data: { n: number; sum_y: number } };

export class ApiCallError extends Error {
  constructor(public readonly code: string, message: string) {
    super(message);
  }
}

async function post<T>(base: string, path: string, body: unknown): Promise<T> {
  const resp = await fetch(base + path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  const env = (await resp.json()) as Envelope<T>;
  return unwrap(env);
}

// Shared by live calls and recorded-response replay in tests.
export function unwrap<T>(env: Envelope<T>): T {
  if (!env.ok || env.result === null) {
    const err = env.error ?? { code: "unknown", message: "malformed envelope" };
    throw new ApiCallError(err.code, err.message);
  }
  return env.result;
}

export class Client {
  constructor(private readonly base: string = "") {}

  health(): Promise<{ version: string }> {
    return fetch(this.base + "/api/v1/health")
      .then(r => r.json())
      .then(env => unwrap(env as Envelope<{ version: string }>));
  }

  discreteUpdate(values: number[], weights: number[],
                 likelihood: LikelihoodSpec): Promise<DiscreteUpdateResult> {
    return post(this.base, "/api/v1/discrete/update",
                { values, weights, likelihood });
  }

  discreteCredible(table: BayesTableJson, level: number): Promise<CredibleResult> {
    return post(this.base, "/api/v1/discrete/credible", { table, level });
  }

  betaFromQuantiles(p1: number, q1: number, p2: number,
                    q2: number): Promise<BetaFitResult> {
    return post(this.base, "/api/v1/beta/from-quantiles", { p1, q1, p2, q2 });
  }

  walkStep(weights: number[], current: number,
           seed?: number): Promise<WalkStepResult> {
    return post(this.base, "/api/v1/walk/step",
                { weights, current, mode: "seeded", seed });
  }

  walkRun(weights: number[], start: number, steps: number,
          seed?: number): Promise<WalkRunResult> {
    return post(this.base, "/api/v1/walk/run", { weights, start, steps, seed });
  }
}

// At most one in-flight call per widget: responses that arrive after a newer
// submission carry a stale sequence number and are dropped.
export class LatestOnly {
  private seq = 0;

  async run<T>(call: () => Promise<T>): Promise<T | null> {
    const mine = ++this.seq;
    const out = await call();
    return mine === this.seq ? out : null;
  }
}
