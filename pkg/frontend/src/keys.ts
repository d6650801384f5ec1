// Keyboard-only labeling. One letter per label class; uppercase works the
// same so caps lock cannot stall an annotator mid-queue.

import type { Label } from './api.js';

export const LABEL_KEYS: Record<string, Label> = {
  b: 'burn',
  r: 'regular',
  v: 'vanity-suspect',
  u: 'unstructured',
  o: 'other',
};

export interface KeyActions {
  label: (label: Label) => void;
  toggleDashboard?: () => void;
  dismiss?: () => void;
}

export function keyToLabel(key: string): Label | null {
  return LABEL_KEYS[key.toLowerCase()] ?? null;
}

export function bindKeys(target: EventTarget, actions: KeyActions): () => void {
  const handler = (event: Event) => {
    const ev = event as KeyboardEvent;
    if (ev.ctrlKey || ev.metaKey || ev.altKey) return;
    const tag = (ev.target as HTMLElement | null)?.tagName;
    if (tag === 'INPUT' || tag === 'TEXTAREA') return;
    const label = keyToLabel(ev.key);
    if (label) {
      actions.label(label);
      ev.preventDefault();
      return;
    }
    if (ev.key.toLowerCase() === 'd' && actions.toggleDashboard) {
      actions.toggleDashboard();
      ev.preventDefault();
    } else if (ev.key === 'Escape' && actions.dismiss) {
      actions.dismiss();
    }
  };
  target.addEventListener('keydown', handler);
  return () => target.removeEventListener('keydown', handler);
}
