/** Typed client for the annotation service. */

export interface WordRecord {
  word: string;
  pos: string;
  chunk: string;
  ner: string;
}

export interface AnnotatedDocument {
  sentences: WordRecord[][];
}

export interface LabelEntry {
  label: string;
  description: string;
}

export interface LabelCatalog {
  pos: LabelEntry[];
  chunk: LabelEntry[];
  ner: LabelEntry[];
}

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

async function readError(response: Response): Promise<string> {
  try {
    const payload = (await response.json()) as { error?: string };
    if (payload && typeof payload.error === "string") return payload.error;
  } catch {
    /* non-JSON error body */
  }
  return `request failed with status ${response.status}`;
}

export async function annotate(
  baseUrl: string,
  text: string,
): Promise<AnnotatedDocument> {
  let response: Response;
  try {
    response = await fetch(`${baseUrl}/api/annotate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
  } catch (err) {
    throw new ApiError(`annotation service unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    throw new ApiError(await readError(response), response.status);
  }
  return (await response.json()) as AnnotatedDocument;
}

export async function fetchLabels(baseUrl: string): Promise<LabelCatalog> {
  let response: Response;
  try {
    response = await fetch(`${baseUrl}/api/labels`);
  } catch (err) {
    throw new ApiError(`annotation service unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    throw new ApiError(await readError(response), response.status);
  }
  return (await response.json()) as LabelCatalog;
}
