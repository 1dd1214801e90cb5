// Keyboard-first labeling queue: 1/2/3 label the focused fragment as
// negative/neutral/positive, space skips it to the back of the page.

import { ApiClient, ApiError } from './api.js';
import type { FragmentJson, Sentiment } from './types.js';

export const KEY_TO_LABEL: Record<string, Sentiment> = {
  '1': 'negative',
  '2': 'neutral',
  '3': 'positive',
};

export const SKIP_KEY = ' ';

export interface LabelingState {
  items: FragmentJson[];
  current: FragmentJson | null;
  totalUnlabeled: number;
  error: string | null;
  lastLabeled: { fragmentId: string; label: Sentiment } | null;
  empty: boolean;
}

export class LabelingQueue {
  private items: FragmentJson[] = [];
  private cursor: string | null = null;
  private totalUnlabeled = 0;
  private error: string | null = null;
  private lastLabeled: { fragmentId: string; label: Sentiment } | null = null;
  private loaded = false;

  constructor(
    private readonly api: ApiClient,
    private readonly annotator: string,
    private readonly pageSize = 20,
  ) {}

  state(): LabelingState {
    return {
      items: [...this.items],
      current: this.items[0] ?? null,
      totalUnlabeled: this.totalUnlabeled,
      error: this.error,
      lastLabeled: this.lastLabeled,
      empty: this.loaded && this.items.length === 0,
    };
  }

  async load(): Promise<LabelingState> {
    const page = await this.api.labelingQueue(null, this.pageSize);
    this.items = page.items;
    this.cursor = page.cursor;
    this.totalUnlabeled = page.total_unlabeled;
    this.loaded = true;
    this.error = null;
    return this.state();
  }

  /** Handle a key press on the focused fragment. Unknown keys are ignored;
   * nothing is sent when the queue is empty. Returns true when the key did
   * something. */
  async handleKey(key: string): Promise<boolean> {
    if (key === SKIP_KEY) {
      return this.skip();
    }
    const label = KEY_TO_LABEL[key];
    if (!label) return false;
    const current = this.items[0];
    if (!current) return false;
    try {
      const updated = await this.api.submitLabel(current.id, label, this.annotator);
      this.error = null;
      this.lastLabeled = { fragmentId: updated.id, label };
      this.items.shift();
      this.totalUnlabeled = Math.max(0, this.totalUnlabeled - 1);
      if (this.items.length === 0) {
        await this.refill();
      }
      return true;
    } catch (err) {
      // Item stays focused; the error is shown inline and the queue does
      // not advance.
      this.error = err instanceof ApiError ? err.message : String(err);
      return true;
    }
  }

  /** Space: push the focused fragment to the back of the local page. */
  skip(): boolean {
    if (this.items.length < 2) return this.items.length === 1;
    const [first, ...rest] = this.items;
    this.items = [...rest, first];
    return true;
  }

  /** Browse to the next page without labeling, passing the server's cursor
   * back verbatim. */
  async nextPage(): Promise<LabelingState> {
    const page = await this.api.labelingQueue(this.cursor, this.pageSize);
    this.items = page.items.slice(0, this.pageSize);
    this.cursor = page.cursor;
    this.totalUnlabeled = page.total_unlabeled;
    return this.state();
  }

  private async refill(): Promise<void> {
    // Labeled items leave the server-side queue, so the next batch always
    // starts from the front; an offset cursor would skip fragments.
    const page = await this.api.labelingQueue(null, this.pageSize);
    // Guard the page-size invariant even against a misbehaving server.
    this.items = page.items.slice(0, this.pageSize);
    this.cursor = page.cursor;
    this.totalUnlabeled = page.total_unlabeled;
  }
}
