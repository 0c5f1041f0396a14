import { ApiClient } from "../api.js";
import { metadataPage } from "../controllers.js";

async function init(): Promise<void> {
  const main = document.querySelector("main")!;
  const id = new URLSearchParams(window.location.search).get("id");
  main.innerHTML = await metadataPage(id, new ApiClient());
}

document.addEventListener("DOMContentLoaded", () => void init());
