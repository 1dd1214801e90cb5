// JSON shapes of the screening service API. Field names mirror the wire
// format exactly; the UI never derives metric values from these, it only
// renders them.

export type Sentiment = 'negative' | 'neutral' | 'positive';

export const SENTIMENTS: readonly Sentiment[] = ['negative', 'neutral', 'positive'];

export interface FragmentJson {
  id: string;
  doc_id: string;
  index: number;
  text: string;
  lang: 'english' | 'bangla' | 'mixed' | 'unknown';
  label: Sentiment | null;
  predicted: PredictionJson | null;
  doc_title: string | null;
  doc_origin_ref: string | null;
}

export interface PredictionJson {
  label: Sentiment;
  scores: Record<Sentiment, number>;
  source: 'baseline' | 'remote';
}

export interface LabelingPage {
  items: FragmentJson[];
  cursor: string | null;
  total_unlabeled: number;
}

export type TriageStatus = 'pending' | 'escalated' | 'dismissed';

export interface TriageItemJson {
  item_id: string;
  fragment_id: string;
  run_id: string;
  prediction: PredictionJson;
  status: TriageStatus;
  created_at: string;
  decided_by: string | null;
  decided_at: string | null;
  fragment?: FragmentJson;
}

export interface PerClassJson {
  label: Sentiment;
  precision: number | null;
  recall: number | null;
  f1: number | null;
  support: number;
}

export interface ReportJson {
  schema_version: number;
  metadata: {
    classifier_id: string;
    dataset_id: string;
    timestamp: string;
    seed: number | null;
    fraction: number | null;
  };
  matrix: {
    order: string;
    labels: Sentiment[];
    counts: number[][];
    total: number;
  };
  per_class: PerClassJson[];
  weighted: { precision: number | null; recall: number | null; f1: number | null };
  accuracy: number | null;
  cross_rates: {
    pred_positive_given_actual_negative: number | null;
    pred_negative_given_actual_positive: number | null;
  };
  has_undefined: boolean;
  display: {
    accuracy: string;
    weighted_precision: string;
    weighted_recall: string;
    weighted_f1: string;
    per_class: Record<Sentiment, { precision: string; recall: string; f1: string }>;
    cross_rates: string[];
  };
}

export interface EvalRunJson {
  run_id: string;
  dataset_id: string;
  classifier: Record<string, unknown>;
  fraction: number;
  seed: number;
  created_at: string;
  partial: boolean;
  report: ReportJson;
}

export interface EvalRunSummaryJson {
  run_id: string;
  dataset_id: string;
  created_at: string;
  accuracy_display: string;
  partial: boolean;
}

export interface ErrorBody {
  code: string;
  message: string;
  detail: unknown;
}
