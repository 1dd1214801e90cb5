import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { statusChip, TriageQueue } from '../src/triage.js';
import { createStubServer, makeTriageItem } from './stub-server.js';

function setup(itemIds: string[]) {
  const stub = createStubServer();
  itemIds.forEach((id, i) => {
    stub.state.triage.set(
      id,
      makeTriageItem(id, `flagged text ${i}`, `2024-09-0${(i % 8) + 1}T00:00:00+00:00`),
    );
  });
  const api = new ApiClient({ baseUrl: 'http://stub', fetchFn: stub.fetchFn });
  return { stub, queue: new TriageQueue(api, 'analyst-1') };
}

describe('TriageQueue', () => {
  it('loads pending items oldest first', async () => {
    const { queue } = setup(['r:c', 'r:a', 'r:b']);
    const state = await queue.load('pending');
    const created = state.items.map((item) => item.created_at);
    expect([...created].sort()).toEqual(created);
  });

  it('escalating removes the item from the pending view', async () => {
    const { stub, queue } = setup(['r:a', 'r:b']);
    await queue.load('pending');
    const state = await queue.decide('r:a', 'escalate');
    expect(state.items.map((i) => i.item_id)).toEqual(['r:b']);
    expect(state.notice).toBeNull();
    expect(stub.state.triage.get('r:a')!.status).toBe('escalated');
    expect(stub.state.triage.get('r:a')!.decided_by).toBe('analyst-1');
  });

  it('conflict refreshes the queue and shows a notice', async () => {
    const { stub, queue } = setup(['r:a', 'r:b']);
    await queue.load('pending');
    // Someone else decides r:a between load and our decision.
    stub.state.triage.set('r:a', {
      ...stub.state.triage.get('r:a')!,
      status: 'dismissed',
      decided_by: 'other',
      decided_at: '2024-09-02T00:00:00+00:00',
    });
    const state = await queue.decide('r:a', 'escalate');
    expect(state.notice).toMatch(/already decided/);
    expect(state.items.map((i) => i.item_id)).toEqual(['r:b']);
    // The item kept the other analyst's decision.
    expect(stub.state.triage.get('r:a')!.decided_by).toBe('other');
  });

  it('dismissed item shows its status chip in the history view', async () => {
    const { queue } = setup(['r:a']);
    await queue.load('pending');
    await queue.decide('r:a', 'dismiss');
    const history = await queue.load('dismissed');
    expect(history.items).toHaveLength(1);
    expect(statusChip(history.items[0])).toBe('dismissed by analyst-1');
  });

  it('unknown item refreshes with a notice', async () => {
    const { queue } = setup(['r:a']);
    await queue.load('pending');
    const state = await queue.decide('r:ghost', 'dismiss');
    expect(state.notice).toMatch(/no longer exists/);
    expect(state.items).toHaveLength(1);
  });
});
