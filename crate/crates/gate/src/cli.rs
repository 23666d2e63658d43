//! The `gate` command.
//!
//! Every subcommand calls the same [`Gateway`] operation as the matching
//! HTTP endpoint. Exit status is 0 on success, 1 on a domain error and 2 on
//! a usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use gate_core::{Annotation, Attributes};
use serde::Serialize;

use crate::api::{
    AnnotationDto, ApiError, ApiResult, BatchEntry, ChainRequest, Gateway, KeySpec, NewAnnotation, RunResultDto,
    ScoreRequest, SelectorQuery,
};
use crate::engine::{Engine, EngineConfig, DEFAULT_TIMEOUT};
use crate::format;
use crate::http::{self, ServerConfig};
use crate::store::Workspace;

#[derive(Debug, Parser)]
#[command(name = "gate", version, about = "Text engineering workbench")]
pub struct Cli {
    /// Directory holding the collections.
    #[arg(long, global = true, env = "GATE_ROOT", default_value = ".")]
    root: PathBuf,
    /// Directory of module descriptor files.
    #[arg(long, global = true, env = "GATE_MODULES")]
    modules: Option<PathBuf>,
    /// Directory holding lexicon.tsv and gazetteer.tsv.
    #[arg(long, global = true, env = "GATE_RESOURCES")]
    resources: Option<PathBuf>,
    /// Seconds before an external module is killed.
    #[arg(long, global = true, default_value_t = DEFAULT_TIMEOUT.as_secs())]
    timeout: u64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create or list collections.
    #[command(subcommand)]
    Collection(CollectionCmd),
    /// Add, list or read documents.
    #[command(subcommand)]
    Doc(DocCmd),
    /// Add an SGML file as a document, its elements becoming annotations.
    ImportSgml {
        #[command(flatten)]
        coll: CollArg,
        doc_id: String,
        /// Input file, `-` for stdin.
        file: PathBuf,
    },
    /// Write a document as SGML.
    ExportSgml {
        #[command(flatten)]
        target: DocArg,
        #[command(flatten)]
        sel: SelArgs,
    },
    /// List, add or delete annotations.
    #[command(subcommand)]
    Ann(AnnCmd),
    /// List registered modules.
    Modules,
    /// Module states for a document.
    States {
        #[command(flatten)]
        target: DocArg,
    },
    /// Run one module on a document.
    Run {
        #[command(flatten)]
        target: DocArg,
        module: String,
    },
    /// Run a chain of modules from `--start` to its end.
    RunChain {
        #[command(flatten)]
        target: DocArg,
        #[arg(long)]
        start: String,
        #[arg(required = true)]
        chain: Vec<String>,
    },
    /// Run one module on every document of a collection.
    RunCollection {
        #[command(flatten)]
        coll: CollArg,
        module: String,
    },
    /// Compare response annotations against a key.
    Score {
        #[command(flatten)]
        target: DocArg,
        /// Selector, e.g. `type=token;producer=tokenizer-*;span=0:5`.
        #[arg(long, default_value = "")]
        response: String,
        /// Key selector over the same document.
        #[arg(long, conflicts_with = "key_file", required_unless_present = "key_file")]
        key: Option<String>,
        /// Key annotations in `.ann` format.
        #[arg(long)]
        key_file: Option<PathBuf>,
        #[arg(long)]
        strict_attrs: bool,
    },
    /// Serve the HTTP interface.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Directory with console assets, served under /ui/.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum CollectionCmd {
    Create { name: String },
    List,
}

#[derive(Debug, Subcommand)]
enum DocCmd {
    Add {
        #[command(flatten)]
        coll: CollArg,
        doc_id: String,
        /// Content file, `-` for stdin.
        file: PathBuf,
        /// Parse the file as SGML.
        #[arg(long)]
        sgml: bool,
    },
    List {
        #[command(flatten)]
        coll: CollArg,
    },
    Text {
        #[command(flatten)]
        target: DocArg,
        #[arg(long)]
        start: Option<usize>,
        #[arg(long)]
        end: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum AnnCmd {
    List {
        #[command(flatten)]
        target: DocArg,
        #[command(flatten)]
        sel: SelArgs,
    },
    Add {
        #[command(flatten)]
        target: DocArg,
        #[arg(long = "type")]
        type_name: String,
        /// `start:end`, repeatable.
        #[arg(long = "span", required = true, value_parser = parse_span)]
        spans: Vec<[usize; 2]>,
        /// `key=value`, repeatable.
        #[arg(long = "attr", value_parser = parse_attr)]
        attrs: Vec<(String, String)>,
        #[arg(long)]
        producer: Option<String>,
    },
    Delete {
        #[command(flatten)]
        target: DocArg,
        #[command(flatten)]
        sel: SelArgs,
    },
}

#[derive(Debug, Args)]
struct CollArg {
    /// Collection name; may be omitted when the root holds exactly one.
    #[arg(long, short = 'c')]
    collection: Option<String>,
}

#[derive(Debug, Args)]
struct DocArg {
    #[command(flatten)]
    coll: CollArg,
    #[arg(long, short = 'd')]
    doc: String,
}

#[derive(Debug, Args)]
struct SelArgs {
    #[arg(long = "type")]
    type_name: Option<String>,
    #[arg(long)]
    producer: Option<String>,
    /// Overlap query `start:end`.
    #[arg(long, value_parser = parse_span)]
    span: Option<[usize; 2]>,
}

impl SelArgs {
    fn query(&self) -> SelectorQuery {
        SelectorQuery {
            type_name: self.type_name.clone(),
            producer: self.producer.clone(),
            start: self.span.map(|s| s[0]),
            end: self.span.map(|s| s[1]),
        }
    }
}

fn parse_span(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once(':').ok_or("expected start:end")?;
    let a = a.parse().map_err(|_| format!("bad offset {a:?}"))?;
    let b = b.parse().map_err(|_| format!("bad offset {b:?}"))?;
    Ok([a, b])
}

fn parse_attr(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or("expected key=value")?;
    Ok((k.into(), v.into()))
}

/// Parses `type=..;producer=..;span=s:e`; every field is optional.
pub fn parse_selector(s: &str) -> Result<SelectorQuery, String> {
    let mut q = SelectorQuery::default();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value in {part:?}"))?;
        match k {
            "type" => q.type_name = Some(v.into()),
            "producer" => q.producer = Some(v.into()),
            "span" => {
                let [a, b] = parse_span(v)?;
                q.start = Some(a);
                q.end = Some(b);
            }
            _ => return Err(format!("unknown selector field {k:?}")),
        }
    }
    Ok(q)
}

fn read_input(path: &Path) -> ApiResult<Vec<u8>> {
    let mut buf = Vec::new();
    let res = if path == Path::new("-") {
        std::io::stdin().read_to_end(&mut buf).map(|_| ())
    } else {
        std::fs::read(path).map(|b| buf = b)
    };
    res.map_err(|e| ApiError::bad_request(format!("{}: {e}", path.display())))?;
    Ok(buf)
}

enum Output {
    Json(serde_json::Value),
    Text(String),
    Bytes(Vec<u8>),
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("response types serialize")
}

fn ann_lines(anns: &[AnnotationDto]) -> String {
    let mut out = String::new();
    for a in anns {
        let ann = Annotation {
            id: a.id,
            type_name: a.type_name.clone(),
            spans: a.spans.iter().map(|[s, e]| gate_core::Span::new(*s, *e)).collect(),
            attributes: a.attributes.clone(),
            producer: a.producer.clone(),
        };
        format::write_ann_line(&mut out, a.id, &ann);
    }
    out
}

fn run_line(r: &RunResultDto) -> String {
    let mut s = format!(
        "{} on {}: {} annotations added, {} attributes set, results [{}], {} ms\n",
        r.module,
        r.doc_id,
        r.annotations_added,
        r.attributes_set,
        r.labels_recorded.join(", "),
        r.duration_ms
    );
    for line in r.log.lines() {
        let _ = writeln!(s, "  | {line}");
    }
    s
}

struct Ctx<'a> {
    gw: &'a Gateway,
    json: bool,
}

impl Ctx<'_> {
    fn coll(&self, c: &CollArg) -> ApiResult<String> {
        if let Some(name) = &c.collection {
            return Ok(name.clone());
        }
        let all = self.gw.list_collections()?;
        match all.as_slice() {
            [one] => Ok(one.clone()),
            [] => Err(ApiError::bad_request("no collections; pass --collection")),
            _ => Err(ApiError::bad_request("several collections; pass --collection")),
        }
    }

    fn out<T: Serialize>(&self, v: &T, text: impl FnOnce(&T) -> String) -> Output {
        if self.json {
            Output::Json(json(v))
        } else {
            Output::Text(text(v))
        }
    }

    fn exec(&self, cmd: Command) -> ApiResult<Output> {
        let gw = self.gw;
        Ok(match cmd {
            Command::Collection(CollectionCmd::Create { name }) => {
                let info = gw.create_collection(&name)?;
                self.out(&info, |i| format!("created collection {}\n", i.name))
            }
            Command::Collection(CollectionCmd::List) => {
                let names = gw.list_collections()?;
                self.out(&names, |n| n.iter().map(|x| format!("{x}\n")).collect())
            }
            Command::Doc(DocCmd::Add {
                coll,
                doc_id,
                file,
                sgml,
            }) => {
                let c = self.coll(&coll)?;
                let info = gw.add_document(&c, &doc_id, read_input(&file)?, sgml)?;
                self.out(&info, |i| {
                    format!("{}\t{} bytes\t{} annotations\n", i.doc_id, i.length, i.annotations)
                })
            }
            Command::ImportSgml { coll, doc_id, file } => {
                let c = self.coll(&coll)?;
                let info = gw.add_document(&c, &doc_id, read_input(&file)?, true)?;
                self.out(&info, |i| {
                    format!("{}\t{} bytes\t{} annotations\n", i.doc_id, i.length, i.annotations)
                })
            }
            Command::Doc(DocCmd::List { coll }) => {
                let ids = gw.list_documents(&self.coll(&coll)?)?;
                self.out(&ids, |n| n.iter().map(|x| format!("{x}\n")).collect())
            }
            Command::Doc(DocCmd::Text { target, start, end }) => {
                Output::Bytes(gw.text(&self.coll(&target.coll)?, &target.doc, start, end)?)
            }
            Command::ExportSgml { target, sel } => {
                Output::Bytes(gw.export_sgml(&self.coll(&target.coll)?, &target.doc, &sel.query())?)
            }
            Command::Ann(AnnCmd::List { target, sel }) => {
                let anns = gw.annotations(&self.coll(&target.coll)?, &target.doc, &sel.query())?;
                self.out(&anns, |a| ann_lines(a))
            }
            Command::Ann(AnnCmd::Add {
                target,
                type_name,
                spans,
                attrs,
                producer,
            }) => {
                let new = NewAnnotation {
                    type_name,
                    spans,
                    attributes: attrs.into_iter().collect::<Attributes>(),
                    producer,
                };
                let ann = gw.add_annotation(&self.coll(&target.coll)?, &target.doc, new)?;
                self.out(&ann, |a| ann_lines(std::slice::from_ref(a)))
            }
            Command::Ann(AnnCmd::Delete { target, sel }) => {
                let r = gw.delete_annotations(&self.coll(&target.coll)?, &target.doc, &sel.query())?;
                self.out(&r, |r| format!("deleted {}\n", r.deleted))
            }
            Command::Modules => self.out(&gw.modules(), |mods| {
                let mut s = String::new();
                for m in mods {
                    let _ = writeln!(
                        s,
                        "{}\t{}\tpre [{}]\tresults [{}]",
                        m.id,
                        m.coupling,
                        m.preconditions.join(", "),
                        m.results.join(", ")
                    );
                }
                s
            }),
            Command::States { target } => {
                let st = gw.states(&self.coll(&target.coll)?, &target.doc)?;
                self.out(&st, |st| {
                    let mut s = String::new();
                    for m in &st.modules {
                        let _ = write!(s, "{}\t{}", m.id, m.state);
                        for p in &m.unmet {
                            let _ = write!(s, "\tneeds {:?} from [{}]", p.pattern, p.candidates.join(", "));
                        }
                        s.push('\n');
                    }
                    for [a, b] in &st.edges {
                        let _ = writeln!(s, "edge {a} -> {b}");
                    }
                    s
                })
            }
            Command::Run { target, module } => {
                let r = gw.run(&self.coll(&target.coll)?, &target.doc, &module)?;
                self.out(&r, run_line)
            }
            Command::RunChain { target, start, chain } => {
                let req = ChainRequest { chain, start };
                let rs = gw.run_chain(&self.coll(&target.coll)?, &target.doc, &req)?;
                self.out(&rs, |rs| rs.iter().map(run_line).collect())
            }
            Command::RunCollection { coll, module } => {
                let rs = gw.run_collection(&self.coll(&coll)?, &module)?;
                self.out(&rs, |rs: &Vec<BatchEntry>| {
                    rs.iter()
                        .map(|e| match (&e.result, &e.error) {
                            (Some(r), _) => run_line(r),
                            (None, Some(err)) => format!("{}: {err}\n", e.doc_id),
                            (None, None) => String::new(),
                        })
                        .collect()
                })
            }
            Command::Score {
                target,
                response,
                key,
                key_file,
                strict_attrs,
            } => {
                let response = parse_selector(&response).map_err(ApiError::bad_request)?;
                let key = match (key, key_file) {
                    (Some(k), _) => KeySpec::Selector(parse_selector(&k).map_err(ApiError::bad_request)?),
                    (None, Some(path)) => {
                        let text = String::from_utf8(read_input(&path)?)
                            .map_err(|_| ApiError::bad_request(format!("{}: not UTF-8", path.display())))?;
                        let anns = format::parse_anns(&text)
                            .map_err(|e| ApiError::bad_request(format!("{}: {e}", path.display())))?;
                        KeySpec::Annotations(
                            anns.into_iter()
                                .map(|a| NewAnnotation {
                                    type_name: a.type_name,
                                    spans: a.spans.iter().map(|s| [s.start, s.end]).collect(),
                                    attributes: a.attributes,
                                    producer: Some(a.producer),
                                })
                                .collect(),
                        )
                    }
                    (None, None) => return Err(ApiError::bad_request("--key or --key-file is required")),
                };
                let req = ScoreRequest {
                    response,
                    key,
                    strict_attrs,
                };
                let r = gw.score(&self.coll(&target.coll)?, &target.doc, &req)?;
                self.out(&r, |r| {
                    format!(
                        "matches {} of {} response, {} key\nprecision {} ({:.4})\nrecall {} ({:.4})\nf1 {} ({:.4})\n",
                        r.matches,
                        r.response_size,
                        r.key_size,
                        r.exact.precision,
                        r.precision,
                        r.exact.recall,
                        r.recall,
                        r.exact.f1,
                        r.f1
                    )
                })
            }
            Command::Serve { .. } => unreachable!("handled before dispatch"),
        })
    }
}

fn engine_config(cli: &Cli) -> EngineConfig {
    EngineConfig {
        descriptor_dir: cli.modules.clone(),
        resource_dir: cli.resources.clone(),
        timeout: Some(Duration::from_secs(cli.timeout)),
    }
}

/// Runs the command line `args` (program name first), returning the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Command::Serve { listen, ui } = &cli.command {
        let config = ServerConfig {
            listen: *listen,
            root: cli.root.clone(),
            modules: cli.modules.clone(),
            resources: cli.resources.clone(),
            timeout: Duration::from_secs(cli.timeout),
            ui: ui.clone(),
        };
        return match http::serve(&config) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "gate: {e}");
                1
            }
        };
    }
    let engine = match Engine::load(&engine_config(&cli)) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(stderr, "gate: {e}");
            return 1;
        }
    };
    let gw = Gateway::new(Workspace::new(&cli.root), engine);
    let ctx = Ctx { gw: &gw, json: cli.json };
    match ctx.exec(cli.command) {
        Ok(Output::Json(v)) => {
            let _ = writeln!(stdout, "{v}");
            0
        }
        Ok(Output::Text(s)) => {
            let _ = stdout.write_all(s.as_bytes());
            0
        }
        Ok(Output::Bytes(b)) => {
            let _ = stdout.write_all(&b);
            0
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(stdout, "{}", json(&e));
            }
            let _ = writeln!(stderr, "gate: {e}");
            1
        }
    }
}
