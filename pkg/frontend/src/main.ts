/** Browser entry point: bind the controller to the static page. */

import { ApiClient } from "./api.js";
import { DashboardController, REGIONS, View } from "./controller.js";

function domView(): View {
  return {
    setHtml(region, html) {
      const el = document.querySelector<HTMLElement>(`[data-region="${region}"]`);
      if (el) el.innerHTML = html;
    },
    setText(region, text) {
      const el = document.querySelector<HTMLElement>(`[data-region="${region}"]`);
      if (el) el.textContent = text;
    },
    updateUrl(query) {
      const url = query ? `?${query}` : location.pathname;
      history.replaceState(null, "", url);
    },
  };
}

function readPenaltyInputs(): Record<string, number> {
  const out: Record<string, number> = {};
  document.querySelectorAll<HTMLInputElement>("input[data-penalty]").forEach((input) => {
    const value = Number(input.value);
    if (input.value !== "" && Number.isFinite(value)) {
      out[input.dataset.penalty as string] = value;
    }
  });
  return out;
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const apiBase = params.get("api") ?? "";
  const api = new ApiClient(apiBase);
  const controller = new DashboardController(api, domView(), location.search);

  const slider = document.querySelector<HTMLInputElement>("#alpha-slider");
  if (slider) {
    slider.value = String(controller.state.alpha);
    slider.addEventListener("input", () => controller.setAlpha(Number(slider.value)));
  }

  document.querySelector("#apply-penalties")?.addEventListener("click", () => {
    void controller.setPenalties(readPenaltyInputs());
  });

  document.querySelector("#apply-cap")?.addEventListener("click", () => {
    const input = document.querySelector<HTMLInputElement>("#cap-input");
    const cap = Number(input?.value ?? "");
    if (Number.isFinite(cap)) void controller.applyInventoryCap(cap);
  });

  document.querySelector("#record-decision")?.addEventListener("click", () => {
    const strategy = document.querySelector<HTMLInputElement>("#decision-strategy")?.value ?? "";
    const visibility = document.querySelector<HTMLInputElement>("#decision-visibility")?.value ?? "";
    const author = document.querySelector<HTMLInputElement>("#decision-author")?.value || "dashboard";
    void controller.recordDecision({ supplier_strategy: strategy, visibility, author });
  });

  document.querySelector("#show-backorders")?.addEventListener("click", () => {
    const raw = document.querySelector<HTMLInputElement>("#backorder-scenarios")?.value ?? "";
    const scenarios = raw.split(",").map((s) => s.trim()).filter(Boolean);
    if (scenarios.length) void controller.showBackorders(scenarios);
  });

  document.body.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>(
      '[data-action="open-experiment"]',
    );
    if (target?.dataset.id) {
      event.preventDefault();
      void controller.loadExperiment(target.dataset.id);
    }
  });

  // skew-symmetric hover pairing: highlight a cell and its mirror together
  const togglePair = (event: Event, on: boolean) => {
    const cell = (event.target as HTMLElement).closest<HTMLElement>("td.regret");
    if (!cell?.dataset.pair) return;
    document
      .querySelectorAll(`td.regret[data-pair="${CSS.escape(cell.dataset.pair)}"]`)
      .forEach((el) => el.classList.toggle("paired", on));
  };
  document.body.addEventListener("mouseover", (e) => togglePair(e, true));
  document.body.addEventListener("mouseout", (e) => togglePair(e, false));

  // penalty inputs seeded from the URL state
  for (const [label, value] of Object.entries(controller.state.penalties)) {
    const input = document.querySelector<HTMLInputElement>(`input[data-penalty="${label}"]`);
    if (input) input.value = String(value);
  }

  await controller.start();
}

void boot();

export { REGIONS };
