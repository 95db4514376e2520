// Discrete prior builder: pick values and weights, choose a likelihood, and
// render the server's prior/posterior bars plus a credible set.

import { BayesTableJson, CredibleResult, LikelihoodSpec } from "./api.js";

export interface PriorDraft {
  values: number[];
  weights: number[];
}

export interface Validation {
  ok: boolean;
  message?: string;
}

export function validateDraft(d: PriorDraft): Validation {
  if (d.values.length === 0 || d.values.length !== d.weights.length) {
    return { ok: false, message: "values and weights must pair up" };
  }
  if (d.weights.some(w => w < 0)) {
    return { ok: false, message: "weights cannot be negative" };
  }
  if (!d.weights.some(w => w > 0)) {
    return { ok: false, message: "assign at least one positive weight" };
  }
  return { ok: true };
}

// Proportion activity default: eleven grid values with a unimodal weight
// profile centered at 0.6, paired with 13 successes in 20 trials.
export function proportionPreset(): { draft: PriorDraft; likelihood: LikelihoodSpec } {
  const values = Array.from({ length: 11 }, (_, i) =>
    Number((i / 10).toFixed(1)));
  return {
    draft: { values, weights: [0, 1, 2, 4, 6, 8, 10, 8, 4, 2, 0] },
    likelihood: { kind: "binomial", data: { y: 13, n: 20 } },
  };
}

// Emergency-department preset: five candidate rates, ten periods totaling 31
// visits.
export function edPreset(): { draft: PriorDraft; likelihood: LikelihoodSpec } {
  return {
    draft: {
      values: [3.0, 3.5, 4.0, 4.5, 5.0],
      weights: [0.1, 0.2, 0.4, 0.2, 0.1],
    },
    likelihood: { kind: "poisson", data: { n: 10, sum_y: 31 } },
  };
}

export interface Bar {
  value: number;
  prior: number;
  posterior: number;
  inCredibleSet: boolean;
}

export function tableToBars(table: BayesTableJson,
                            credible?: CredibleResult): Bar[] {
  const chosen = new Set(credible?.values ?? []);
  return table.values.map((v, i) => ({
    value: v,
    prior: table.prior[i],
    posterior: table.posterior[i],
    inCredibleSet: chosen.has(v),
  }));
}

export function posteriorMode(table: BayesTableJson): number {
  let best = 0;
  for (let i = 1; i < table.posterior.length; i++) {
    if (table.posterior[i] > table.posterior[best]) best = i;
  }
  return table.values[best];
}

export function formatCoverage(credible: CredibleResult): string {
  return `{${credible.values.join(", ")}} covers ${(credible.coverage * 100).toFixed(1)}%`;
}
