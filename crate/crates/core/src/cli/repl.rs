use std::io::{self, BufRead, Write};

use crate::pipeline::Engine;

use super::token_line;

const PROMPT: &str = "> ";

/// Line-at-a-time session. Prints the canonical form and a token summary for
/// each line; `:trace` toggles the full JSON trace and `:quit` leaves.
pub fn run_repl(engine: &Engine, input: &mut dyn BufRead, out: &mut dyn Write) -> io::Result<()> {
    let mut trace = false;
    let mut line = String::new();
    loop {
        write!(out, "{PROMPT}")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(());
        }
        let text = line.trim_end_matches(['\n', '\r']);
        match text.trim() {
            "" => continue,
            ":quit" => return Ok(()),
            ":trace" => {
                trace = !trace;
                writeln!(out, "trace {}", if trace { "on" } else { "off" })?;
                continue;
            }
            _ => {}
        }
        match engine.parse(text) {
            Ok(t) => {
                writeln!(out, "{}", t.canonical)?;
                let tokens: Vec<_> = t.sentences.iter().flat_map(|s| s.layers[0].tokens.iter().cloned()).collect();
                writeln!(out, "  {}", token_line(&tokens))?;
                if trace {
                    writeln!(out, "{}", serde_json::to_string(&t).expect("traces serialize"))?;
                }
            }
            Err(e) => writeln!(out, "error: {e}")?,
        }
    }
}
