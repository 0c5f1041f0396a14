// Page controllers: small async functions from (query, api) to HTML.
// The DOM glue in pages/ only mounts their output and wires events, so
// everything behavioural is testable without a browser.

import { ApiClient, ApiError } from "./api.js";
import {
  acknowledgementView,
  conflictView,
  dashboardView,
  errorBanner,
  metadataView,
  notFoundView,
  outcomeView,
  requestFormView,
  secretPromptView,
  unknownTokenView,
} from "./views.js";

export const SERVICE_DOWN =
  "The repository service is not reachable right now. Please try again later.";

export async function metadataPage(id: string | null, api: ApiClient): Promise<string> {
  if (!id) {
    return errorBanner("No record id given. Append ?id=… to the page address.");
  }
  try {
    return metadataView(await api.getEprint(id));
  } catch (error) {
    if (error instanceof ApiError && error.status === 404) {
      return notFoundView(id);
    }
    return errorBanner(SERVICE_DOWN);
  }
}

export async function requestFormPage(id: string | null, api: ApiClient): Promise<string> {
  if (!id) {
    return errorBanner("No record id given.");
  }
  try {
    const view = await api.getEprint(id);
    if (!view.requestable) {
      return errorBanner(
        "This deposit is open access; you can download it straight from its page.");
    }
    return requestFormView(view);
  } catch (error) {
    if (error instanceof ApiError && error.status === 404) {
      return notFoundView(id);
    }
    return errorBanner(SERVICE_DOWN);
  }
}

export interface SubmitResult {
  ok: boolean;
  html: string;
}

export async function submitRequest(
  id: string,
  fields: { email: string; purpose: string; purposeText: string; attested: boolean },
  api: ApiClient,
): Promise<SubmitResult> {
  try {
    const ack = await api.submitRequest(id, {
      email: fields.email.trim(),
      purpose: fields.purpose,
      purpose_text: fields.purpose === "other" ? fields.purposeText.trim() : undefined,
      attested: fields.attested,
    });
    return { ok: true, html: acknowledgementView(ack.message) };
  } catch (error) {
    if (error instanceof ApiError) {
      // 409 (not requestable) and 422 (attestation/address) surface verbatim.
      return { ok: false, html: errorBanner(error.detail) };
    }
    return { ok: false, html: errorBanner(SERVICE_DOWN) };
  }
}

export async function decisionLandingPage(
  token: string | null,
  action: string | null,
  api: ApiClient,
): Promise<string> {
  if (!token || (action !== "accept" && action !== "reject")) {
    return unknownTokenView();
  }
  try {
    // One call per page load; the service applies it exactly once and
    // answers reloads with the already-recorded outcome.
    return outcomeView(await api.respond(token, action));
  } catch (error) {
    if (error instanceof ApiError && error.status === 404) {
      return unknownTokenView();
    }
    if (error instanceof ApiError && error.status === 409) {
      return conflictView(error.detail);
    }
    return errorBanner(SERVICE_DOWN);
  }
}

export async function dashboardPage(secret: string | null, api: ApiClient): Promise<string> {
  if (!secret) {
    return secretPromptView("Enter the admin secret to view statistics and advisories.");
  }
  try {
    const [responses, access, alerts] = await Promise.all([
      api.adminResponseStats(secret),
      api.adminAccessStats(secret),
      api.adminAlerts(secret),
    ]);
    return dashboardView(responses, access, alerts.alerts);
  } catch (error) {
    if (error instanceof ApiError && error.status === 401) {
      return secretPromptView("That secret was not accepted. Try again.");
    }
    return errorBanner(SERVICE_DOWN);
  }
}
