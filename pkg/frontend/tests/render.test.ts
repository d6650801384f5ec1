import { describe, expect, it } from 'vitest';

import type { RoundReport } from '../src/api.js';
import {
  renderAddress,
  renderEmptyState,
  renderRoundDashboard,
  renderScoreBadge,
} from '../src/render.js';
import { makeItem } from './fakeServer.js';

describe('renderAddress', () => {
  it('covers a repeat run with a run-highlight span', () => {
    const address = '1CounterpartyXXXXXXXXXXXXXXXUWLpVr';
    const runStart = address.indexOf('XXX');
    const runEnd = address.lastIndexOf('X') + 1;
    const item = makeItem({
      address,
      highlights: [
        { start: runStart, end: runEnd, kind: 'run', text: address.slice(runStart, runEnd) },
      ],
    });
    const node = renderAddress(item);
    const marks = node.querySelectorAll('mark.hl-run');
    expect(marks).toHaveLength(1);
    expect(marks[0].textContent).toBe('XXXXXXXXXXXXXXX');
    expect(node.textContent).toBe(address);
  });

  it('renders word and run spans with distinct classes', () => {
    const address = '1EaterXXXXXXabc';
    const item = makeItem({
      address,
      highlights: [
        { start: 1, end: 6, kind: 'word', text: 'Eater' },
        { start: 6, end: 12, kind: 'run', text: 'XXXXXX' },
      ],
    });
    const node = renderAddress(item);
    expect(node.querySelector('mark.hl-word')?.textContent).toBe('Eater');
    expect(node.querySelector('mark.hl-run')?.textContent).toBe('XXXXXX');
  });

  it('plain addresses render as bare text', () => {
    const item = makeItem({ address: '1NoPatternHere', highlights: [] });
    const node = renderAddress(item);
    expect(node.querySelectorAll('mark')).toHaveLength(0);
    expect(node.textContent).toBe('1NoPatternHere');
  });
});

describe('renderScoreBadge', () => {
  it('echoes the payload number without reformatting', () => {
    expect(renderScoreBadge(0.999).textContent).toBe('0.999');
    expect(renderScoreBadge(0.25).textContent).toBe('0.25');
    expect(renderScoreBadge(1).textContent).toBe('1');
  });
});

describe('renderEmptyState', () => {
  it('distinguishes converged from merely drained', () => {
    expect(renderEmptyState(true).textContent).toContain('converged');
    expect(renderEmptyState(false).textContent).toContain('Run a round');
  });
});

describe('renderRoundDashboard', () => {
  it('prompts when no rounds have run', () => {
    const node = renderRoundDashboard([]);
    expect(node.querySelector('table')).toBeNull();
    expect(node.textContent).toContain('No rounds yet');
  });

  it('renders every payload value verbatim, one row per round', () => {
    const rounds: RoundReport[] = [
      {
        round: 1,
        predicted: 5675,
        confirmed: 5376,
        rejected: 299,
        pending: 0,
        new_tp: 3294,
        by_scheme: {
          base58: { predicted: 5600, confirmed: 5312, rejected: 288, pending: 0, new_tp: 3250 },
          bech32: { predicted: 75, confirmed: 64, rejected: 11, pending: 0, new_tp: 44 },
        },
        seed: 7,
      },
    ];
    const node = renderRoundDashboard(rounds);
    const cells = Array.from(node.querySelectorAll('tbody td')).map(
      (td) => td.textContent,
    );
    expect(cells).toEqual(['1', '5675', '5376', '299', '3294', '0', '5312', '64', '7']);
  });
});
