// Form gating for the request page. Mirrors the service's permissive
// syntactic email rule; the service remains the authority and its errors
// are surfaced verbatim.

const EMAIL_RE = /^[^@\s]+@[^@\s]+\.[^@\s]+$/;

export function isValidEmail(address: string): boolean {
  return EMAIL_RE.test(address.trim());
}

export interface FormGate {
  canSubmit: boolean;
  emailError: string | null;
}

export function gateForm(email: string, attested: boolean, purpose: string,
                         purposeText: string): FormGate {
  let emailError: string | null = null;
  if (email.trim() !== "" && !isValidEmail(email)) {
    emailError = "Please enter a valid email address.";
  }
  const purposeOk = purpose !== "other" || purposeText.trim() !== "";
  const canSubmit = isValidEmail(email) && attested && purposeOk;
  return { canSubmit, emailError };
}
