// Beta elicitation page state (iterate-and-revise). The fitted shapes and
// intervals always mirror the most recent API response; every attempt,
// including failed ones, stays in the append-only history.

import { ApiError, BetaFitResult } from "./api.js";

export interface Attempt {
  median: number;
  p90: number;
  fit: BetaFitResult | null;
  error: ApiError | null;
}

export interface ElicitationSession {
  median: number | null;
  p90: number | null;
  fitted: BetaFitResult | null;
  history: readonly Attempt[];
}

export function newSession(): ElicitationSession {
  return { median: null, p90: null, fitted: null, history: [] };
}

export interface Validation {
  ok: boolean;
  message?: string;
}

// Client-side precondition check; invalid inputs never reach the API.
export function validateInputs(median: number, p90: number): Validation {
  if (!Number.isFinite(median) || !Number.isFinite(p90)) {
    return { ok: false, message: "both inputs must be numbers" };
  }
  if (median <= 0 || p90 >= 1) {
    return { ok: false, message: "quantiles must lie strictly inside (0, 1)" };
  }
  if (median >= p90) {
    return { ok: false, message: "the median must be below the 90th percentile" };
  }
  return { ok: true };
}

export function applyFit(s: ElicitationSession, median: number, p90: number,
                         fit: BetaFitResult): ElicitationSession {
  return {
    median,
    p90,
    fitted: fit,
    history: [...s.history, { median, p90, fit, error: null }],
  };
}

// A rejected assessment keeps the form contents and the previous fit on
// screen; only the history gains the failed attempt.
export function applyError(s: ElicitationSession, median: number, p90: number,
                           error: ApiError): ElicitationSession {
  return {
    median: s.median,
    p90: s.p90,
    fitted: s.fitted,
    history: [...s.history, { median, p90, fit: null, error }],
  };
}

export interface IntervalView {
  central50: string;
  central90: string;
  shapes: string;
}

export function formatFit(fit: BetaFitResult, digits = 3): IntervalView {
  const iv = (pair: [number, number]) =>
    `(${pair[0].toFixed(digits)}, ${pair[1].toFixed(digits)})`;
  return {
    central50: iv(fit.intervals.central50),
    central90: iv(fit.intervals.central90),
    shapes: `a = ${fit.a.toFixed(digits)}, b = ${fit.b.toFixed(digits)}`,
  };
}

// Polyline points for the density plot, scaled into an SVG viewport.
export function densityPolyline(fit: BetaFitResult, width: number,
                                height: number): string {
  const { grid, pdf } = fit.density;
  const top = Math.max(...pdf);
  return grid
    .map((x, i) => {
      const px = x * width;
      const py = height - (pdf[i] / top) * height;
      return `${px.toFixed(1)},${py.toFixed(1)}`;
    })
    .join(" ");
}

export function intervalWidth(fit: BetaFitResult, level: 50 | 90): number {
  const pair = level === 50 ? fit.intervals.central50 : fit.intervals.central90;
  return pair[1] - pair[0];
}
