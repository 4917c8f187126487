/** DOM wiring for the demo page; all markup comes from render.ts. */

import { annotate, fetchLabels, ApiError } from "./api.js";
import { renderDocument, renderError, renderHelp } from "./render.js";

const params = new URLSearchParams(window.location.search);
const BASE_URL = params.get("api") ?? "";

const textbox = document.getElementById("text") as HTMLTextAreaElement;
const submitBtn = document.getElementById("submit") as HTMLButtonElement;
const helpBtn = document.getElementById("help") as HTMLButtonElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const result = document.getElementById("result") as HTMLDivElement;
const legend = document.getElementById("legend") as HTMLDivElement;

let pending = false;
let legendLoaded = false;

function refreshSubmitState() {
  submitBtn.disabled = pending || textbox.value.trim() === "";
}

function showError(message: string) {
  banner.innerHTML = renderError(message);
  banner.hidden = false;
}

function clearError() {
  banner.hidden = true;
  banner.innerHTML = "";
}

async function onSubmit() {
  if (pending || textbox.value.trim() === "") return;
  pending = true;
  refreshSubmitState();
  clearError();
  try {
    const doc = await annotate(BASE_URL, textbox.value);
    result.innerHTML = renderDocument(doc);
  } catch (err) {
    // keep whatever was rendered before
    showError(err instanceof ApiError ? err.message : String(err));
  } finally {
    pending = false;
    refreshSubmitState();
  }
}

async function onHelp() {
  if (!legend.hidden) {
    legend.hidden = true;
    return;
  }
  if (!legendLoaded) {
    try {
      legend.innerHTML = renderHelp(await fetchLabels(BASE_URL));
      legendLoaded = true;
    } catch (err) {
      showError(err instanceof ApiError ? err.message : String(err));
      return;
    }
  }
  legend.hidden = false;
}

textbox.addEventListener("input", refreshSubmitState);
submitBtn.addEventListener("click", () => void onSubmit());
helpBtn.addEventListener("click", () => void onHelp());
refreshSubmitState();
