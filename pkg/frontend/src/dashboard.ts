// Evaluation dashboard view models. Every displayed number is taken
// verbatim from an API response field (the report's `display` block for
// formatted figures, raw counts for the matrix); this module does no
// metric arithmetic. Undefined metrics arrive as null and render as "n/a".

import { ApiClient, ApiError } from './api.js';
import type { EvalRunJson, Sentiment } from './types.js';

export interface MetricBar {
  label: Sentiment;
  precision: { text: string; fraction: number };
  recall: { text: string; fraction: number };
  f1: { text: string; fraction: number };
  support: number;
}

export interface MatrixCell {
  predicted: Sentiment;
  actual: Sentiment;
  count: number;
  diagonal: boolean;
}

export interface DashboardView {
  kind: 'report';
  runId: string;
  classifierId: string;
  datasetId: string;
  seed: number | null;
  fraction: number | null;
  labels: Sentiment[];
  matrixRows: { predicted: Sentiment; cells: MatrixCell[] }[];
  bars: MetricBar[];
  summary: {
    accuracy: string;
    weightedPrecision: string;
    weightedRecall: string;
    weightedF1: string;
    crossRates: string[];
  };
  hasUndefined: boolean;
  partial: boolean;
}

export interface NotFoundView {
  kind: 'not-found';
  runId: string;
  message: string;
}

function bar(text: string, numeric: number | null): { text: string; fraction: number } {
  // Bar length is presentation geometry from the numeric field; the text
  // shown next to it is the server-formatted string, untouched.
  return { text, fraction: numeric === null ? 0 : Math.max(0, Math.min(1, numeric)) };
}

export function dashboardView(run: EvalRunJson): DashboardView {
  const report = run.report;
  const labels = report.matrix.labels;
  const matrixRows = labels.map((predicted, i) => ({
    predicted,
    cells: labels.map((actual, j) => ({
      predicted,
      actual,
      count: report.matrix.counts[i][j],
      diagonal: i === j,
    })),
  }));
  const bars = report.per_class.map((m) => {
    const display = report.display.per_class[m.label];
    return {
      label: m.label,
      precision: bar(display.precision, m.precision),
      recall: bar(display.recall, m.recall),
      f1: bar(display.f1, m.f1),
      support: m.support,
    };
  });
  return {
    kind: 'report',
    runId: run.run_id,
    classifierId: report.metadata.classifier_id,
    datasetId: report.metadata.dataset_id,
    seed: report.metadata.seed,
    fraction: report.metadata.fraction,
    labels,
    matrixRows,
    bars,
    summary: {
      accuracy: report.display.accuracy,
      weightedPrecision: report.display.weighted_precision,
      weightedRecall: report.display.weighted_recall,
      weightedF1: report.display.weighted_f1,
      crossRates: report.display.cross_rates,
    },
    hasUndefined: report.has_undefined,
    partial: run.partial,
  };
}

export async function loadDashboard(
  api: ApiClient,
  runId: string,
): Promise<DashboardView | NotFoundView> {
  try {
    return dashboardView(await api.evalRun(runId));
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      return { kind: 'not-found', runId, message: err.body?.message ?? 'run not found' };
    }
    throw err;
  }
}
