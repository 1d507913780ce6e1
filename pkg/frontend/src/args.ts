/** Tiny flag parser shared by the two commands. */

export function parseFlags(
  argv: string[],
  spec: Record<string, { required?: boolean; hasValue: boolean }>,
  usage: string,
): Record<string, string | boolean> {
  const out: Record<string, string | boolean> = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) throw new Error(`unexpected argument ${arg}\n${usage}`);
    const name = arg.slice(2);
    const entry = spec[name];
    if (!entry) throw new Error(`unknown flag --${name}\n${usage}`);
    if (entry.hasValue) {
      const value = argv[++i];
      if (value === undefined) throw new Error(`--${name} requires a value\n${usage}`);
      out[name] = value;
    } else {
      out[name] = true;
    }
  }
  for (const [name, entry] of Object.entries(spec)) {
    if (entry.required && !(name in out)) {
      throw new Error(`missing required flag --${name}\n${usage}`);
    }
  }
  return out;
}
