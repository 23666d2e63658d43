//! Loose coupling: modules as external executables.
//!
//! The executable is started as `<exec> --raw <content file>` with
//! `GATE_DOC_ID` in its environment. Its stdin carries a header line
//! `gate-ann 1 <content length>` followed by the document's annotations in
//! `.ann` line format. On stdout it prints new annotations in the same
//! format with id `0`, or `@attr <id>\t<k>=<v>[;...]` lines to set
//! attributes on existing annotations. Exit status 0 means success; stderr
//! is kept as the run log.

use std::io::{Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::Duration;

use gate_core::creole::{Execution, ModuleFailure};
use gate_core::Document;
use wait_timeout::ChildExt;

use crate::format;

pub fn stdin_payload(doc: &Document) -> Vec<u8> {
    let mut out = format!("gate-ann 1 {}\n", doc.len());
    out.push_str(&format::write_anns(doc));
    out.into_bytes()
}

/// Applies protocol output to `doc`. Annotations are stored under
/// `producer` whatever the producer field says. Returns the number of
/// `@attr` lines applied.
pub fn apply_output(doc: &mut Document, producer: &str, stdout: &str) -> Result<usize, String> {
    let mut attrs_set = 0;
    for (i, line) in stdout.lines().enumerate() {
        let n = i + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@attr ") {
            let (id, field) = rest
                .split_once('\t')
                .ok_or_else(|| format!("line {n}: expected @attr <id>\\t<k>=<v>"))?;
            let id: u64 = id.parse().map_err(|_| format!("line {n}: bad id {id:?}"))?;
            let attrs = format::parse_attr_field(field, n).map_err(|e| e.to_string())?;
            doc.set_attributes(id, attrs).map_err(|e| format!("line {n}: {e}"))?;
            attrs_set += 1;
            continue;
        }
        let ann = format::parse_ann_line(line, n).map_err(|e| e.to_string())?;
        if ann.id != 0 {
            return Err(format!("line {n}: annotation id must be 0, got {}", ann.id));
        }
        doc.add_annotation(&ann.type_name, ann.spans, ann.attributes, producer)
            .map_err(|e| format!("line {n}: {e}"))?;
    }
    Ok(attrs_set)
}

/// Runs one external module against `doc`, killing it after `timeout`.
pub fn run_loose(
    executable: &Path,
    raw: &Path,
    doc: &mut Document,
    producer: &str,
    timeout: Duration,
) -> Result<Execution, ModuleFailure> {
    let mut child = Command::new(executable)
        .arg("--raw")
        .arg(raw)
        .env("GATE_DOC_ID", doc.doc_id())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| ModuleFailure::new(format!("cannot start {}: {e}", executable.display())))?;

    let payload = stdin_payload(doc);
    let mut stdin = child.stdin.take().expect("stdin piped");
    // a module may exit without reading its input; broken pipes are fine
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(&payload);
    });
    let mut stdout = child.stdout.take().expect("stdout piped");
    let out_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let mut stderr = child.stderr.take().expect("stderr piped");
    let err_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    let status = match child.wait_timeout(timeout) {
        Ok(Some(status)) => status,
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            let log = String::from_utf8_lossy(&err_reader.join().unwrap_or_default()).into_owned();
            return Err(ModuleFailure {
                status: None,
                message: format!("timed out after {}s", timeout.as_secs_f64()),
                log,
            });
        }
        Err(e) => return Err(ModuleFailure::new(format!("wait failed: {e}"))),
    };
    let _ = writer.join();
    let out = out_reader.join().unwrap_or_default();
    let log = String::from_utf8_lossy(&err_reader.join().unwrap_or_default()).into_owned();

    if !status.success() {
        return Err(ModuleFailure {
            status: status.code(),
            message: match status.code() {
                Some(code) => format!("exited with status {code}"),
                None => "killed by signal".into(),
            },
            log,
        });
    }
    let protocol = |message: String| ModuleFailure {
        status: Some(0),
        message: format!("protocol error: {message}"),
        log: log.clone(),
    };
    let text = String::from_utf8(out).map_err(|_| protocol("stdout is not UTF-8".into()))?;
    let attributes_set = apply_output(doc, producer, &text).map_err(protocol)?;
    Ok(Execution { attributes_set, log })
}
