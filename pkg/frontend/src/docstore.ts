/** Optional document-text lookup from a static path keyed by doc id. */

export class DocStore {
  constructor(
    private readonly baseUrl: string | null,
    private readonly fetchImpl: (input: string) => Promise<Response> = (input) => fetch(input),
  ) {}

  /** Text of a document, or null when no store is configured or the
   * document has no stored text. */
  async text(docId: string): Promise<string | null> {
    if (!this.baseUrl) {
      return null;
    }
    const base = this.baseUrl.replace(/\/+$/, '');
    try {
      const response = await this.fetchImpl(`${base}/${encodeURIComponent(docId)}.txt`);
      return response.ok ? await response.text() : null;
    } catch {
      return null;
    }
  }
}
