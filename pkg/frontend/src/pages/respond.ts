import { ApiClient } from "../api.js";
import { decisionLandingPage } from "../controllers.js";

// One-click decision landing: the respond call fires once on load and the
// page shows whatever the service recorded. Reloading is safe because the
// decision endpoint is idempotent.
async function init(): Promise<void> {
  const main = document.querySelector("main")!;
  const params = new URLSearchParams(window.location.search);
  main.innerHTML = await decisionLandingPage(
    params.get("token"), params.get("action"), new ApiClient());
}

document.addEventListener("DOMContentLoaded", () => void init());
