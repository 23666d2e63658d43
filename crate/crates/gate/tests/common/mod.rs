#![allow(dead_code)]

use std::fs;
use std::net::SocketAddr;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Duration;

use gate::api::Gateway;
use gate::engine::{Engine, EngineConfig};
use gate::http::{Server, ServerConfig};
use gate::store::Workspace;

pub const SARAH: &[u8] = b"Sarah savored the soup.";

/// A resource directory holding the lexicon and gazetteer of the
/// "Sarah savored the soup." walkthrough.
pub fn resources(dir: &Path) -> PathBuf {
    let res = dir.join("resources");
    fs::create_dir_all(&res).unwrap();
    fs::write(res.join("lexicon.tsv"), "savored\tVBD\nthe\tDT\nsoup\tNN\n").unwrap();
    fs::write(res.join("gazetteer.tsv"), "Sarah\tperson\n").unwrap();
    res
}

pub fn engine(dir: &Path, modules: Option<PathBuf>) -> Engine {
    Engine::load(&EngineConfig {
        descriptor_dir: modules,
        resource_dir: Some(resources(dir)),
        timeout: Some(Duration::from_secs(20)),
    })
    .unwrap()
}

/// Gateway over `<dir>/root` with the built-in modules.
pub fn gateway(dir: &Path) -> Gateway {
    let root = dir.join("root");
    fs::create_dir_all(&root).unwrap();
    Gateway::new(Workspace::new(root), engine(dir, None))
}

pub fn config(dir: &Path, modules: Option<PathBuf>) -> ServerConfig {
    let root = dir.join("root");
    fs::create_dir_all(&root).unwrap();
    ServerConfig {
        listen: "127.0.0.1:0".parse().unwrap(),
        root,
        modules,
        resources: Some(resources(dir)),
        timeout: Duration::from_secs(20),
        ui: None,
    }
}

/// Starts a server on a background thread and returns its address.
pub fn spawn_server(config: ServerConfig) -> SocketAddr {
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let server = Server::bind(&config).await.unwrap();
            tx.send(server.local_addr().unwrap()).unwrap();
            server.run().await.unwrap();
        });
    });
    rx.recv_timeout(Duration::from_secs(10)).unwrap()
}

/// Writes an executable shell script.
pub fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, format!("#!/bin/sh\n{body}")).unwrap();
    fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
    path
}

/// Writes a loose module descriptor into `modules`.
pub fn descriptor(modules: &Path, name: &str, version: &str, body: &str) {
    fs::create_dir_all(modules).unwrap();
    fs::write(
        modules.join(format!("{name}.creole")),
        format!("name={name}\nversion={version}\n{body}"),
    )
    .unwrap();
}

/// Every file under `dir` with its bytes, paths relative to `dir`.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                out.push((p.strip_prefix(base).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
