// Triage queue controller: pending items oldest first, escalate/dismiss,
// with explicit handling for decisions that already happened elsewhere.

import { ApiClient, ApiError } from './api.js';
import type { TriageItemJson, TriageStatus } from './types.js';

export interface TriageState {
  items: TriageItemJson[];
  notice: string | null;
  status: TriageStatus | 'all';
}

export class TriageQueue {
  private items: TriageItemJson[] = [];
  private notice: string | null = null;
  private statusFilter: TriageStatus | 'all' = 'pending';

  constructor(
    private readonly api: ApiClient,
    private readonly analyst: string,
  ) {}

  state(): TriageState {
    return { items: [...this.items], notice: this.notice, status: this.statusFilter };
  }

  async load(status: TriageStatus | 'all' = 'pending'): Promise<TriageState> {
    this.statusFilter = status;
    const response = await this.api.triageQueue(status);
    this.items = response.items;
    return this.state();
  }

  /** Decide one item. On success it leaves the pending list in place (no
   * full reload). A 409 means someone else decided it first: the list is
   * refreshed, the item disappears, and a notice explains why. */
  async decide(itemId: string, action: 'escalate' | 'dismiss'): Promise<TriageState> {
    try {
      const updated = await this.api.decideTriage(itemId, action, this.analyst);
      this.notice = null;
      if (this.statusFilter === 'pending') {
        this.items = this.items.filter((item) => item.item_id !== itemId);
      } else {
        this.items = this.items.map((item) => (item.item_id === itemId ? updated : item));
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.notice = `Item was already decided elsewhere (${err.body?.message ?? 'conflict'}).`;
        await this.load(this.statusFilter);
      } else if (err instanceof ApiError && err.status === 404) {
        this.notice = 'Item no longer exists; refreshing the queue.';
        await this.load(this.statusFilter);
      } else {
        this.notice = err instanceof Error ? err.message : String(err);
      }
    }
    return this.state();
  }
}

/** Chip text for an item's status in the history view. */
export function statusChip(item: TriageItemJson): string {
  if (item.status === 'pending') return 'pending';
  return `${item.status} by ${item.decided_by ?? '?'}`;
}
