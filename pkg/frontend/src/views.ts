// Pure view functions: service data in, HTML string out. Every dynamic
// value is escaped; stats and legal text are rendered exactly as the
// service provided them, never recomputed here.

import type {
  AccessStats,
  Alert,
  PublicEprintView,
  RespondOutcome,
  ResponseStats,
} from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function errorBanner(message: string): string {
  return `<div class="banner error" role="alert">${escapeHtml(message)}</div>`;
}

export function notFoundView(id: string): string {
  return `<section class="card">
  <h1>Not found</h1>
  <p>There is no record ${escapeHtml(id)} in this repository.</p>
</section>`;
}

export function metadataView(view: PublicEprintView): string {
  const md = view.metadata;
  const creators = md.creators.map(escapeHtml).join("; ");
  const requestButton = view.requestable
    ? `<a class="button request-copy" href="request.html?id=${encodeURIComponent(view.id)}">Request a copy</a>`
    : "";
  const links = (view.document_links ?? [])
    .map((href, i) =>
      `<li><a href="${escapeHtml(href)}" class="document-link">Download part ${i + 1}</a></li>`)
    .join("\n      ");
  const documents = view.requestable
    ? `<p class="access-note">The full text of this deposit is not publicly
       downloadable. You can ask the author for an individual copy.</p>
       ${requestButton}`
    : `<ul class="document-links">
      ${links}
    </ul>`;
  return `<article class="card eprint">
  <h1>${escapeHtml(md.title)}</h1>
  <p class="creators">${creators} (${md.year})</p>
  <p class="citation">${escapeHtml(md.citation_line)}</p>
  <p class="access-kind" data-access="${escapeHtml(view.access_kind)}">
    ${view.access_kind === "open" ? "Open access" : "Closed access"}
  </p>
  ${documents}
</article>`;
}

export function requestFormView(view: PublicEprintView): string {
  // The attestation wording comes from the service's jurisdiction profile.
  const attestation = escapeHtml(view.attestation_text ?? "");
  return `<section class="card request-form">
  <h1>Request a copy</h1>
  <p class="citation">${escapeHtml(view.metadata.citation_line)}</p>
  <form id="request-form" novalidate>
    <label for="email">Your email address</label>
    <input type="email" id="email" name="email" autocomplete="email" required>
    <p class="inline-error" id="email-error" hidden></p>

    <label for="purpose">Purpose of the request</label>
    <select id="purpose" name="purpose">
      <option value="research">Research</option>
      <option value="private-study">Private study</option>
      <option value="criticism">Criticism</option>
      <option value="news-reporting">News reporting</option>
      <option value="other">Other (explain below)</option>
    </select>
    <input type="text" id="purpose-text" name="purpose_text"
           placeholder="Explain the intended use" hidden>

    <label class="attestation">
      <input type="checkbox" id="attested" name="attested">
      <span>${attestation}</span>
    </label>

    <button type="submit" id="submit" disabled>Request a copy</button>
    <p class="inline-error" id="form-error" hidden></p>
  </form>
</section>`;
}

export function acknowledgementView(message: string): string {
  return `<section class="card ack">
  <h1>Request sent</h1>
  <p>${escapeHtml(message)}</p>
</section>`;
}

export function outcomeView(outcome: RespondOutcome): string {
  const heading = outcome.state === "approved" ? "Document sent" : "Request declined";
  return `<section class="card outcome" data-state="${escapeHtml(outcome.state)}">
  <h1>${heading}</h1>
  <p>${escapeHtml(outcome.message)}</p>
  <p class="title">${escapeHtml(outcome.title)}</p>
</section>`;
}

export function conflictView(detail: string): string {
  return `<section class="card outcome conflict">
  <h1>Already decided</h1>
  <p>This request was already answered with the opposite decision, so this
     link no longer applies.</p>
  <p class="detail">${escapeHtml(detail)}</p>
</section>`;
}

export function unknownTokenView(): string {
  return `<section class="card outcome unknown-token">
  <h1>Unknown link</h1>
  <p>This decision link is not recognized. It may have been truncated by
     your mail client; try copying the full URL from the email.</p>
</section>`;
}

export function secretPromptView(message: string): string {
  return `<section class="card login">
  <h1>Repository dashboard</h1>
  <p>${escapeHtml(message)}</p>
  <form id="secret-form">
    <label for="secret">Admin secret</label>
    <input type="password" id="secret" name="secret" autocomplete="off">
    <button type="submit">Open dashboard</button>
  </form>
</section>`;
}

export function dashboardView(responses: ResponseStats, access: AccessStats,
                              alerts: Alert[]): string {
  // Row strings arrive fully rendered from the service and are shown
  // verbatim; the UI must not reformat them.
  const responseRows = Object.entries(responses.rendered_rows)
    .map(([label, value]) =>
      `<tr><td>${escapeHtml(label)}</td><td class="value">${escapeHtml(value)}</td></tr>`)
    .join("\n      ");
  const alertItems = alerts.length === 0
    ? "<li class=\"empty\">No advisories.</li>"
    : alerts.map((alert) =>
        `<li class="alert" data-kind="${escapeHtml(alert.kind)}">
          <a href="eprint.html?id=${encodeURIComponent(alert.eprint_id)}">${escapeHtml(alert.eprint_id)}</a>
          ${escapeHtml(alert.message)}
        </li>`).join("\n      ");
  return `<section class="card dashboard">
  <h1>Repository dashboard</h1>

  <h2>Author responses</h2>
  <table class="stats responses">
    <tbody>
      ${responseRows}
      <tr><td>Requests in period</td><td class="value">${responses.total}</td></tr>
      <tr><td>Still fresh (excluded)</td><td class="value">${responses.fresh_pending}</td></tr>
    </tbody>
  </table>

  <h2>Number of articles</h2>
  <table class="stats access">
    <tbody>
      <tr><td>Total</td><td class="value">${access.total}</td></tr>
      <tr><td>Closed Access</td><td class="value">${escapeHtml(access.closed_share_display)}</td></tr>
    </tbody>
  </table>

  <h2>Fair-dealing advisories</h2>
  <ul class="alerts">
      ${alertItems}
  </ul>
</section>`;
}
