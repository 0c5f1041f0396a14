import { ApiClient } from "../api.js";
import { dashboardPage } from "../controllers.js";

// The secret is typed by the manager and kept for the session only; it is
// never embedded in the bundle or a link.
const STORAGE_KEY = "almostoa-admin-secret";

async function render(main: HTMLElement, api: ApiClient): Promise<void> {
  const secret = sessionStorage.getItem(STORAGE_KEY);
  main.innerHTML = await dashboardPage(secret, api);
  const form = main.querySelector<HTMLFormElement>("#secret-form");
  if (form) {
    sessionStorage.removeItem(STORAGE_KEY); // a rejected secret is dropped
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const input = form.querySelector<HTMLInputElement>("#secret")!;
      sessionStorage.setItem(STORAGE_KEY, input.value);
      void render(main, api);
    });
  }
}

document.addEventListener("DOMContentLoaded", () => {
  void render(document.querySelector("main")!, new ApiClient());
});
