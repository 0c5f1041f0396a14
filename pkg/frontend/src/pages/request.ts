import { ApiClient } from "../api.js";
import { requestFormPage, submitRequest } from "../controllers.js";
import { gateForm } from "../validation.js";

function wireForm(main: HTMLElement, id: string, api: ApiClient): void {
  const form = main.querySelector<HTMLFormElement>("#request-form");
  if (!form) {
    return; // controller rendered an error or not-found view instead
  }
  const email = form.querySelector<HTMLInputElement>("#email")!;
  const purpose = form.querySelector<HTMLSelectElement>("#purpose")!;
  const purposeText = form.querySelector<HTMLInputElement>("#purpose-text")!;
  const attested = form.querySelector<HTMLInputElement>("#attested")!;
  const submit = form.querySelector<HTMLButtonElement>("#submit")!;
  const emailError = form.querySelector<HTMLElement>("#email-error")!;
  const formError = form.querySelector<HTMLElement>("#form-error")!;

  const refresh = () => {
    const gate = gateForm(email.value, attested.checked, purpose.value,
                          purposeText.value);
    submit.disabled = !gate.canSubmit;
    emailError.hidden = gate.emailError === null;
    emailError.textContent = gate.emailError ?? "";
    purposeText.hidden = purpose.value !== "other";
  };
  for (const element of [email, purpose, purposeText, attested]) {
    element.addEventListener("input", refresh);
    element.addEventListener("change", refresh);
  }
  refresh();

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const gate = gateForm(email.value, attested.checked, purpose.value,
                          purposeText.value);
    if (!gate.canSubmit) {
      return; // invalid input never reaches the network
    }
    submit.disabled = true;
    const result = await submitRequest(id, {
      email: email.value,
      purpose: purpose.value,
      purposeText: purposeText.value,
      attested: attested.checked,
    }, api);
    if (result.ok) {
      main.innerHTML = result.html;
    } else {
      formError.hidden = false;
      formError.innerHTML = result.html;
      submit.disabled = false;
    }
  });
}

async function init(): Promise<void> {
  const main = document.querySelector("main")!;
  const id = new URLSearchParams(window.location.search).get("id");
  const api = new ApiClient();
  main.innerHTML = await requestFormPage(id, api);
  if (id) {
    wireForm(main as HTMLElement, id, api);
  }
}

document.addEventListener("DOMContentLoaded", () => void init());
