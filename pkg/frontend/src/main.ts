// Entry point: wires the API client, queue controller, key bindings and
// the two views (labeling, round dashboard) into #app.

import { TriageApi } from './api.js';
import { bindKeys, LABEL_KEYS } from './keys.js';
import {
  renderEmptyState,
  renderItemCard,
  renderNotice,
  renderProgress,
  renderRoundDashboard,
} from './render.js';
import { QueueController, type QueueState } from './state.js';

function apiBase(): string {
  const override = new URLSearchParams(window.location.search).get('api');
  return override ?? 'http://127.0.0.1:8314';
}

function annotatorName(): string {
  const key = 'burnscan.annotator';
  let name = window.localStorage.getItem(key);
  if (!name) {
    name = `annotator-${Math.random().toString(36).slice(2, 8)}`;
    window.localStorage.setItem(key, name);
  }
  return name;
}

export function mount(root: HTMLElement, api: TriageApi, annotator: string) {
  root.textContent = '';
  const queueView = document.createElement('main');
  queueView.className = 'queue-view';
  const dashView = document.createElement('aside');
  dashView.className = 'dashboard-view';
  dashView.hidden = true;
  root.appendChild(queueView);
  root.appendChild(dashView);

  let dashboardOpen = false;
  let converged = false;

  const keyLegend = document.createElement('footer');
  keyLegend.className = 'key-legend';
  keyLegend.textContent =
    Object.entries(LABEL_KEYS)
      .map(([k, label]) => `${k.toUpperCase()}=${label}`)
      .join('  ') + '  D=dashboard';

  const draw = (state: QueueState) => {
    queueView.textContent = '';
    if (state.notice) queueView.appendChild(renderNotice(state.notice));
    queueView.appendChild(renderProgress(state.progress));
    if (state.phase === 'labeling' && state.current) {
      queueView.appendChild(renderItemCard(state.current));
    } else if (state.phase === 'empty') {
      queueView.appendChild(renderEmptyState(converged));
    } else if (state.phase === 'error') {
      // notice banner above already carries the message
    } else {
      const loading = document.createElement('p');
      loading.textContent = 'loading queue...';
      queueView.appendChild(loading);
    }
    queueView.appendChild(keyLegend);
  };

  const controller = new QueueController(api, annotator, draw);

  const refreshDashboard = async () => {
    try {
      const view = await api.rounds();
      converged = view.converged;
      dashView.textContent = '';
      dashView.appendChild(renderRoundDashboard(view.rounds));
    } catch {
      // leave the previous table; the queue view surfaces connectivity
    }
  };

  const unbind = bindKeys(window, {
    label: (label) => void controller.submit(label),
    toggleDashboard: () => {
      dashboardOpen = !dashboardOpen;
      dashView.hidden = !dashboardOpen;
      if (dashboardOpen) void refreshDashboard();
    },
    dismiss: () => controller.dismissNotice(),
  });

  void controller.start().then(refreshDashboard);
  return { controller, unbind, refreshDashboard };
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  const root = document.getElementById('app') as HTMLElement;
  mount(root, new TriageApi(apiBase()), annotatorName());
}
