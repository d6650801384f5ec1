// DOM builders. All values rendered here come straight off API payloads;
// nothing is recomputed client-side beyond formatting.

import type { RoundReport, TriageItem } from './api.js';
import type { Notice } from './state.js';

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderAddress(item: TriageItem): HTMLElement {
  // chars can sit inside both a run and a word span; build a class per
  // character and group equal neighbours into one element
  const text = item.address;
  const classes: string[] = new Array(text.length).fill('');
  for (const span of item.highlights) {
    const cls = span.kind === 'run' ? 'hl-run' : 'hl-word';
    for (let i = span.start; i < span.end && i < text.length; i++) {
      classes[i] = classes[i] && classes[i] !== cls ? 'hl-run hl-word' : cls;
    }
  }
  const root = el('code', 'address');
  let start = 0;
  for (let i = 1; i <= text.length; i++) {
    if (i === text.length || classes[i] !== classes[start]) {
      const chunk = text.slice(start, i);
      if (classes[start]) root.appendChild(el('mark', classes[start], chunk));
      else root.appendChild(document.createTextNode(chunk));
      start = i;
    }
  }
  return root;
}

export function renderScoreBadge(score: number): HTMLElement {
  // shortest round-trip form equals the JSON literal the server sent
  return el('span', 'score-badge', String(score));
}

const SATS_PER_BTC = 100_000_000;

function formatSats(sats: number): string {
  return `${sats.toLocaleString('en-US')} sat (${(sats / SATS_PER_BTC).toFixed(8)} BTC)`;
}

export function renderStatsPanel(item: TriageItem): HTMLElement {
  const panel = el('dl', 'stats-panel');
  const rows: Array<[string, string]> = [
    ['scheme', item.scheme],
    ['round', String(item.round)],
    ['first seen', new Date(item.stats.first_apparition * 1000).toISOString()],
    ['last seen', new Date(item.stats.last_apparition * 1000).toISOString()],
    ['transactions', String(item.stats.tx_count)],
    ['total received', formatSats(item.stats.total_received)],
    ['total sent', formatSats(item.stats.total_sent)],
  ];
  for (const [k, v] of rows) {
    panel.appendChild(el('dt', undefined, k));
    panel.appendChild(el('dd', undefined, v));
  }
  if (item.context_txids.length) {
    panel.appendChild(el('dt', undefined, 'context txids'));
    const dd = el('dd', 'context-txids');
    for (const txid of item.context_txids) {
      dd.appendChild(el('code', undefined, txid));
    }
    panel.appendChild(dd);
  }
  return panel;
}

export function renderItemCard(item: TriageItem): HTMLElement {
  const card = el('section', 'item-card');
  const head = el('header');
  head.appendChild(renderAddress(item));
  head.appendChild(renderScoreBadge(item.score));
  card.appendChild(head);
  card.appendChild(renderStatsPanel(item));
  return card;
}

export function renderEmptyState(converged: boolean): HTMLElement {
  const box = el('section', 'empty-state');
  box.appendChild(
    el(
      'p',
      undefined,
      converged
        ? 'Queue empty: the loop converged, no new burn candidates.'
        : 'Queue empty. Run a round to sweep the candidate pool.',
    ),
  );
  return box;
}

export function renderNotice(notice: Notice): HTMLElement {
  const banner = el('div', `notice notice-${notice.kind}`);
  banner.appendChild(el('span', undefined, notice.text));
  return banner;
}

const DASHBOARD_COLUMNS = [
  'round',
  'predicted',
  'confirmed (TP)',
  'rejected (FP)',
  'new TP',
  'pending',
  'base58 TP',
  'bech32 TP',
  'seed',
];

export function renderRoundDashboard(rounds: RoundReport[]): HTMLElement {
  const wrap = el('section', 'round-dashboard');
  if (!rounds.length) {
    wrap.appendChild(el('p', 'empty-state', 'No rounds yet. Run one to populate the table.'));
    return wrap;
  }
  const table = el('table');
  const thead = el('thead');
  const headRow = el('tr');
  for (const col of DASHBOARD_COLUMNS) headRow.appendChild(el('th', undefined, col));
  thead.appendChild(headRow);
  table.appendChild(thead);
  const tbody = el('tbody');
  for (const r of rounds) {
    const row = el('tr');
    const base58 = r.by_scheme['base58']?.confirmed ?? 0;
    const bech32 = r.by_scheme['bech32']?.confirmed ?? 0;
    const cells = [
      r.round,
      r.predicted,
      r.confirmed,
      r.rejected,
      r.new_tp,
      r.pending,
      base58,
      bech32,
      r.seed,
    ];
    for (const value of cells) row.appendChild(el('td', undefined, String(value)));
    tbody.appendChild(row);
  }
  table.appendChild(tbody);
  wrap.appendChild(table);
  return wrap;
}

export function renderProgress(progress: {
  confirmed: number;
  rejected: number;
  pending: number;
}): HTMLElement {
  const bar = el('div', 'progress-bar');
  bar.appendChild(el('span', 'progress-confirmed', `burn ${progress.confirmed}`));
  bar.appendChild(el('span', 'progress-rejected', `rejected ${progress.rejected}`));
  bar.appendChild(el('span', 'progress-pending', `pending ${progress.pending}`));
  return bar;
}
