import { describe, expect, it } from 'vitest';

import { chartSeries, renderTrajectorySvg } from '../src/chart.js';

const trajectory = [
  { doc_id: 'd1', f_beta: { macro: 0.62, micro: 0.7 } },
  { doc_id: 'd2', f_beta: { macro: 0.66, micro: 0.72 } },
];

describe('chartSeries', () => {
  it('prefixes the pre-validation estimate at n = 0', () => {
    const series = chartSeries(trajectory, 'macro', { macro: 0.6, micro: 0.65 });
    expect(series).toEqual([
      { n: 0, value: 0.6 },
      { n: 1, value: 0.62 },
      { n: 2, value: 0.66 },
    ]);
  });

  it('switches series with the averaging toggle', () => {
    expect(chartSeries(trajectory, 'micro', null).map((p) => p.value)).toEqual([0.7, 0.72]);
  });

  it('skips points without the requested averaging', () => {
    const sparse = [{ doc_id: 'd1', f_beta: {} }, ...trajectory];
    const series = chartSeries(sparse, 'macro', null);
    expect(series.map((p) => p.n)).toEqual([2, 3]);
  });
});

describe('renderTrajectorySvg', () => {
  it('renders a polyline through all points', () => {
    const svg = renderTrajectorySvg(chartSeries(trajectory, 'macro', null), 'macro');
    expect(svg).toContain('<svg');
    expect(svg).toContain('<polyline');
    expect((svg.match(/<circle/g) ?? []).length).toBe(2);
  });

  it('handles an empty series without a polyline', () => {
    const svg = renderTrajectorySvg([], 'macro');
    expect(svg).toContain('<svg');
    expect(svg).not.toContain('<polyline');
    expect(svg).toContain('latest: –');
  });

  it('escapes the label', () => {
    const svg = renderTrajectorySvg([], '<script>');
    expect(svg).toContain('&lt;script&gt;');
  });
});
