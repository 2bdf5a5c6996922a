/** Browser entry point: wires the annotator state machine to the DOM.
 *
 * Configuration via query parameters:
 *   ?api=http://host:port        service base URL (default: same origin)
 *   &docs=/texts                 optional static document-text path
 *   &session=ID&token=TOKEN      resume an existing session
 */

import { ApiClient } from './api.js';
import { AnnotatorSession, SessionView } from './session.js';
import { chartSeries, renderTrajectorySvg, Averaging } from './chart.js';
import { DocStore } from './docstore.js';

const params = new URLSearchParams(window.location.search);
const client = new ApiClient(params.get('api') ?? window.location.origin);
const docStore = new DocStore(params.get('docs'));

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
};

const connectForm = el('connect-form') as HTMLFormElement;
const reviewPanel = el('review-panel');
const docTitle = el('doc-title');
const docText = el('doc-text');
const classList = el('class-list');
const progress = el('progress');
const chartHost = el('chart');
const errorBox = el('error');
const submitBtn = el('submit-btn') as HTMLButtonElement;
const stopBtn = el('stop-btn') as HTMLButtonElement;
const averagingToggle = el('averaging-toggle') as HTMLSelectElement;

let session: AnnotatorSession | null = null;

function renderChart(view: SessionView): void {
  const averaging = averagingToggle.value as Averaging;
  const series = chartSeries(view.trajectory, averaging, view.initialEstimate);
  chartHost.innerHTML = renderTrajectorySvg(series, `estimated Fβ (${averaging})`);
}

function renderClasses(view: SessionView): void {
  classList.innerHTML = '';
  if (!view.current) return;
  for (const [cls, label] of Object.entries(view.current.predicted_labels)) {
    const p = view.current.misclassification_probabilities[cls];
    const row = document.createElement('label');
    row.className = 'class-row';
    const box = document.createElement('input');
    box.type = 'checkbox';
    box.checked = view.flips.has(cls);
    box.addEventListener('change', () => {
      if (session) render(session.toggleFlip(cls));
    });
    const text = document.createElement('span');
    text.textContent = `${cls}: predicted ${label > 0 ? '+' : '−'} (P(wrong) ${p.toFixed(3)})`;
    row.append(box, text);
    classList.append(row);
  }
}

async function render(view: SessionView): Promise<void> {
  errorBox.textContent = view.lastError ?? '';
  progress.textContent =
    view.phase === 'exhausted'
      ? `done — validated ${view.visited.length} documents`
      : `validated ${view.visited.length}, remaining ${view.remaining}`;
  submitBtn.disabled = view.phase !== 'reviewing';
  stopBtn.disabled = view.phase === 'closed' || view.phase === 'idle';
  renderChart(view);
  renderClasses(view);
  if (view.current) {
    docTitle.textContent = view.current.doc_id;
    const text = await docStore.text(view.current.doc_id);
    docText.textContent = text ?? '(no stored text)';
  } else {
    docTitle.textContent = view.phase === 'exhausted' ? 'all documents validated' : '';
    docText.textContent = '';
  }
}

async function run(work: () => Promise<SessionView>): Promise<void> {
  try {
    await render(await work());
  } catch (err) {
    errorBox.textContent = err instanceof Error ? err.message : String(err);
  }
}

connectForm.addEventListener('submit', (event) => {
  event.preventDefault();
  const data = new FormData(connectForm);
  const sessionId = String(data.get('session') ?? '');
  const token = String(data.get('token') ?? '');
  if (!sessionId || !token) {
    errorBox.textContent = 'session id and token are required';
    return;
  }
  session = new AnnotatorSession(client, sessionId, token);
  reviewPanel.hidden = false;
  void run(() => session!.start());
});

submitBtn.addEventListener('click', () => {
  if (session) void run(() => session!.submit());
});

stopBtn.addEventListener('click', () => {
  if (session) void run(() => session!.stop());
});

averagingToggle.addEventListener('change', () => {
  if (session) void render(session.view);
});

// resume straight from the URL when both credentials are present
const urlSession = params.get('session');
const urlToken = params.get('token');
if (urlSession && urlToken) {
  session = new AnnotatorSession(client, urlSession, urlToken);
  reviewPanel.hidden = false;
  void run(() => session!.start());
}
