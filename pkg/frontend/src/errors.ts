/** Raised when an input artifact fails schema or content validation. */
export class FigureInputError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FigureInputError";
  }
}
