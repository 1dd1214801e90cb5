// Browser wiring: tabs for labeling, triage, and the evaluation dashboard.
// All state lives in the controllers; this file only renders and forwards
// events.

import { ApiClient } from './api.js';
import { loadDashboard } from './dashboard.js';
import { KEY_TO_LABEL, LabelingQueue, SKIP_KEY } from './labeling.js';
import { statusChip, TriageQueue } from './triage.js';

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function escapeHtml(text: string): string {
  const div = document.createElement('div');
  div.textContent = text;
  return div.innerHTML;
}

function config(): { baseUrl: string; token?: string; analyst: string } {
  const params = new URLSearchParams(window.location.search);
  return {
    baseUrl: params.get('api') ?? window.location.origin,
    token: params.get('token') ?? undefined,
    analyst: params.get('analyst') ?? 'analyst',
  };
}

const cfg = config();
const api = new ApiClient({ baseUrl: cfg.baseUrl, token: cfg.token });
const labeling = new LabelingQueue(api, cfg.analyst);
const triage = new TriageQueue(api, cfg.analyst);

let activeTab: 'label' | 'triage' | 'dashboard' | 'guide' = 'label';

function renderLabeling(): void {
  const state = labeling.state();
  const card = el('label-card');
  el('label-total').textContent = String(state.totalUnlabeled);
  if (!state.current) {
    card.innerHTML = '<div class="empty">Labeling queue is empty. Nothing to do.</div>';
    return;
  }
  const fragment = state.current;
  card.innerHTML = `
    <div class="meta">
      <span class="chip lang-${fragment.lang}">${fragment.lang}</span>
      ${fragment.doc_title ? `<span class="chip">${escapeHtml(fragment.doc_title)}</span>` : ''}
      <span class="chip muted">${escapeHtml(fragment.id)}</span>
    </div>
    <div class="fragment-text">${escapeHtml(fragment.text)}</div>
    ${state.error ? `<div class="error">${escapeHtml(state.error)}</div>` : ''}
    <div class="hint">1 = negative &nbsp; 2 = neutral &nbsp; 3 = positive &nbsp; space = skip</div>
  `;
}

function renderTriage(): void {
  const state = triage.state();
  const list = el('triage-list');
  el('triage-notice').textContent = state.notice ?? '';
  if (state.items.length === 0) {
    list.innerHTML = '<div class="empty">No items in this view.</div>';
    return;
  }
  list.innerHTML = state.items
    .map((item) => {
      const scores = item.prediction.scores;
      const fragment = item.fragment;
      return `
      <div class="card" data-item="${escapeHtml(item.item_id)}">
        <div class="meta">
          <span class="chip status-${item.status}">${escapeHtml(statusChip(item))}</span>
          <span class="chip muted">run ${escapeHtml(item.run_id)}</span>
          ${fragment?.doc_origin_ref ? `<span class="chip muted">${escapeHtml(fragment.doc_origin_ref)}</span>` : ''}
        </div>
        <div class="fragment-text">${escapeHtml(fragment?.text ?? item.fragment_id)}</div>
        <div class="scores">negative ${scores.negative.toFixed(3)} · neutral ${scores.neutral.toFixed(3)} · positive ${scores.positive.toFixed(3)}</div>
        ${
          item.status === 'pending'
            ? `<div class="actions">
                 <button data-action="escalate">Escalate</button>
                 <button data-action="dismiss">Dismiss</button>
               </div>`
            : ''
        }
      </div>`;
    })
    .join('');
  list.querySelectorAll('button[data-action]').forEach((button) => {
    button.addEventListener('click', async (event) => {
      const target = event.currentTarget as HTMLButtonElement;
      const card = target.closest('[data-item]') as HTMLElement;
      await triage.decide(card.dataset.item!, target.dataset.action as 'escalate' | 'dismiss');
      renderTriage();
    });
  });
}

async function renderDashboard(runId: string | null): Promise<void> {
  const host = el('dashboard-body');
  if (!runId) {
    const runs = await api.listEvalRuns();
    if (runs.items.length === 0) {
      host.innerHTML = '<div class="empty">No evaluation runs yet.</div>';
      return;
    }
    host.innerHTML = `<ul class="runs">${runs.items
      .map(
        (run) =>
          `<li><a href="#" data-run="${escapeHtml(run.run_id)}">${escapeHtml(run.run_id)}</a>
           <span class="chip">accuracy ${run.accuracy_display}</span>
           ${run.partial ? '<span class="chip status-pending">partial</span>' : ''}</li>`,
      )
      .join('')}</ul>`;
    host.querySelectorAll('a[data-run]').forEach((link) =>
      link.addEventListener('click', (event) => {
        event.preventDefault();
        void renderDashboard((event.currentTarget as HTMLElement).dataset.run!);
      }),
    );
    return;
  }
  const view = await loadDashboard(api, runId);
  if (view.kind === 'not-found') {
    host.innerHTML = `<div class="empty">Run ${escapeHtml(view.runId)} not found: ${escapeHtml(view.message)}</div>`;
    return;
  }
  const header = `<div class="meta">
      <span class="chip">${escapeHtml(view.classifierId)}</span>
      <span class="chip muted">dataset ${escapeHtml(view.datasetId)}</span>
      <span class="chip muted">seed ${view.seed ?? 'n/a'}</span>
      ${view.hasUndefined ? '<span class="chip status-pending">has undefined metrics</span>' : ''}
      ${view.partial ? '<span class="chip status-pending">partial run</span>' : ''}
    </div>`;
  const matrix = `<table class="matrix">
      <tr><th>predicted \\ actual</th>${view.labels.map((l) => `<th>${l}</th>`).join('')}</tr>
      ${view.matrixRows
        .map(
          (row) =>
            `<tr><th>${row.predicted}</th>${row.cells
              .map((c) => `<td class="${c.diagonal ? 'diag' : ''}">${c.count}</td>`)
              .join('')}</tr>`,
        )
        .join('')}
    </table>`;
  const bars = view.bars
    .map(
      (m) => `
      <div class="bar-group">
        <h4>${m.label} <span class="muted">(support ${m.support})</span></h4>
        ${(['precision', 'recall', 'f1'] as const)
          .map(
            (metric) => `
          <div class="bar-row">
            <span class="bar-name">${metric}</span>
            <div class="bar"><div class="bar-fill" style="width:${m[metric].fraction * 100}%"></div></div>
            <span class="bar-value">${m[metric].text}</span>
          </div>`,
          )
          .join('')}
      </div>`,
    )
    .join('');
  const summary = `<div class="summary">
      accuracy <strong>${view.summary.accuracy}</strong> ·
      weighted precision <strong>${view.summary.weightedPrecision}</strong> ·
      weighted recall <strong>${view.summary.weightedRecall}</strong> ·
      weighted F1 <strong>${view.summary.weightedF1}</strong><br>
      P(pred positive | actual negative) <strong>${view.summary.crossRates[0]}</strong> ·
      P(pred negative | actual positive) <strong>${view.summary.crossRates[1]}</strong>
    </div>`;
  host.innerHTML = header + matrix + summary + bars;
}

async function renderGuide(): Promise<void> {
  const guide = await api.annotationGuide();
  el('guide-body').innerHTML =
    '<p class="muted">House guidance authored for this tool.</p>' +
    `<pre class="guide">${escapeHtml(guide.body)}</pre>`;
}

function showTab(tab: typeof activeTab): void {
  activeTab = tab;
  for (const name of ['label', 'triage', 'dashboard', 'guide'] as const) {
    el(`tab-${name}`).classList.toggle('active', name === tab);
    el(`view-${name}`).style.display = name === tab ? 'block' : 'none';
  }
}

async function start(): Promise<void> {
  el('tab-label').addEventListener('click', async () => {
    showTab('label');
    await labeling.load();
    renderLabeling();
  });
  el('tab-triage').addEventListener('click', async () => {
    showTab('triage');
    await triage.load('pending');
    renderTriage();
  });
  el('tab-dashboard').addEventListener('click', () => {
    showTab('dashboard');
    void renderDashboard(null);
  });
  el('tab-guide').addEventListener('click', () => {
    showTab('guide');
    void renderGuide();
  });

  document.addEventListener('keydown', async (event) => {
    if (activeTab !== 'label') return;
    if (event.key !== SKIP_KEY && !(event.key in KEY_TO_LABEL)) return;
    event.preventDefault();
    await labeling.handleKey(event.key);
    renderLabeling();
  });

  showTab('label');
  await labeling.load();
  renderLabeling();
}

void start();
