use std::fs;

use gate::store::{Collection, StoreError, Workspace};
use gate_core::{AnnotationSelector, Attributes, Document, Span};
use tempfile::tempdir;

fn attrs(pairs: &[(&str, &str)]) -> Attributes {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[test]
fn create_then_open_round_trips_manifest() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("news");
    let coll = Collection::create(&path, "news").unwrap();
    coll.add_raw("a", b"first".to_vec(), Attributes::new()).unwrap();
    coll.add_raw("b", b"second".to_vec(), Attributes::new()).unwrap();
    drop(coll);
    let again = Collection::open(&path).unwrap();
    assert_eq!(again.name(), "news");
    assert_eq!(again.doc_ids(), ["a", "b"]);
}

#[test]
fn create_refuses_non_empty_directory() {
    let dir = tempdir().unwrap();
    fs::write(dir.path().join("stray.txt"), "x").unwrap();
    let err = Collection::create(dir.path(), "c").unwrap_err();
    assert!(matches!(err, StoreError::PathOccupied(_)), "{err}");
}

#[test]
fn create_accepts_empty_directory() {
    let dir = tempdir().unwrap();
    Collection::create(dir.path(), "c").unwrap();
    assert!(dir.path().join("manifest.gate").is_file());
}

#[test]
fn open_plain_directory_is_not_a_collection() {
    let dir = tempdir().unwrap();
    let err = Collection::open(dir.path()).unwrap_err();
    assert!(matches!(err, StoreError::NotACollection(_)), "{err}");
}

#[test]
fn corrupt_manifest_reports_line() {
    let dir = tempdir().unwrap();
    Collection::create(dir.path(), "c").unwrap();
    let manifest = dir.path().join("manifest.gate");
    let mut text = fs::read_to_string(&manifest).unwrap();
    text.push_str("garbage line\n");
    fs::write(&manifest, text).unwrap();
    match Collection::open(dir.path()).unwrap_err() {
        StoreError::CorruptManifest { source, .. } => assert_eq!(source.line, 3),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn duplicate_doc_id_is_rejected() {
    let dir = tempdir().unwrap();
    let coll = Collection::create(dir.path(), "c").unwrap();
    coll.add_raw("d", b"x".to_vec(), Attributes::new()).unwrap();
    let err = coll.add_raw("d", b"y".to_vec(), Attributes::new()).unwrap_err();
    assert!(matches!(err, StoreError::DuplicateDocId(_)));
    assert_eq!(coll.doc_ids(), ["d"]);
}

#[test]
fn reopen_reproduces_document_state() {
    let dir = tempdir().unwrap();
    let content = b"caf\xc3\xa9 \x00\xff bytes\tand;odd=chars\n".to_vec();
    let coll = Collection::create(dir.path(), "c").unwrap();
    let handle = coll
        .add_raw("odd;id=%\tx", content.clone(), attrs(&[("headline", "a=b;c\td\ne")]))
        .unwrap();
    {
        let mut doc = handle.write();
        doc.add_annotation("token", vec![Span::new(0, 5)], attrs(&[("pos", "NN")]), "tok-1.0")
            .unwrap();
        doc.add_annotation(
            "pair",
            vec![Span::new(0, 2), Span::new(6, 9)],
            attrs(&[("k;=%", "v\n")]),
            "tok-1.0",
        )
        .unwrap();
        doc.record_result("tok-1.0", "tokens");
        doc.delete_annotations(&AnnotationSelector::of_type("token"));
    }
    coll.flush().unwrap();
    let expected = handle.read().clone();

    let reopened = Collection::open(dir.path()).unwrap();
    let doc = reopened.document("odd;id=%\tx").unwrap();
    let doc = doc.read();
    assert_eq!(doc.content(), &content[..]);
    assert_eq!(doc.attributes, expected.attributes);
    assert_eq!(doc.provenance(), expected.provenance());
    assert_eq!(doc.next_id(), 3);
    let a: Vec<_> = doc.annotations().cloned().collect();
    let b: Vec<_> = expected.annotations().cloned().collect();
    assert_eq!(a, b);
}

#[test]
fn flush_without_changes_rewrites_nothing() {
    let dir = tempdir().unwrap();
    let coll = Collection::create(dir.path(), "c").unwrap();
    let h = coll.add_raw("d", b"Sarah".to_vec(), Attributes::new()).unwrap();
    h.write()
        .add_annotation("name", vec![Span::new(0, 5)], Attributes::new(), "m-1")
        .unwrap();
    coll.flush().unwrap();
    let ann = dir.path().join("docs/d.ann");
    let before = fs::metadata(&ann).unwrap().modified().unwrap();
    std::thread::sleep(std::time::Duration::from_millis(20));
    coll.flush().unwrap();
    assert_eq!(fs::metadata(&ann).unwrap().modified().unwrap(), before);
}

#[test]
fn unwritable_location_is_io_failure_with_path() {
    let dir = tempdir().unwrap();
    let coll = Collection::create(dir.path(), "c").unwrap();
    let docs = dir.path().join("docs");
    fs::remove_dir(&docs).unwrap();
    fs::write(&docs, "not a directory").unwrap();
    match coll.add_raw("d", b"x".to_vec(), Attributes::new()).unwrap_err() {
        StoreError::Io { path, .. } => assert!(path.starts_with(&docs), "{}", path.display()),
        other => panic!("unexpected {other}"),
    }
    assert!(coll.doc_ids().is_empty());
}

#[test]
fn overlay_takes_writes_and_base_stays_untouched() {
    let dir = tempdir().unwrap();
    let base = dir.path().join("base");
    let overlay = dir.path().join("overlay");
    {
        let coll = Collection::create(&base, "c").unwrap();
        coll.add_raw("d", b"Sarah savored".to_vec(), Attributes::new()).unwrap();
    }
    let before = fs::read_dir(base.join("docs")).unwrap().count();
    let base_ann = fs::read(base.join("docs/d.ann")).unwrap();

    let coll = Collection::open_with_overlay(&base, &overlay).unwrap();
    coll.document("d")
        .unwrap()
        .write()
        .add_annotation("token", vec![Span::new(0, 5)], Attributes::new(), "t-1")
        .unwrap();
    coll.flush().unwrap();
    assert_eq!(fs::read(base.join("docs/d.ann")).unwrap(), base_ann);
    assert_eq!(fs::read_dir(base.join("docs")).unwrap().count(), before);

    let again = Collection::open_with_overlay(&base, &overlay).unwrap();
    let h = again.document("d").unwrap();
    assert_eq!(h.read().annotation_count(), 1);
    assert_eq!(h.read().content(), b"Sarah savored");
}

#[test]
fn missing_document_is_reported() {
    let dir = tempdir().unwrap();
    let coll = Collection::create(dir.path(), "c").unwrap();
    assert!(matches!(coll.document("nope"), Err(StoreError::NoSuchDocument(_))));
}

#[test]
fn corrupt_annotation_file_is_reported() {
    let dir = tempdir().unwrap();
    {
        let coll = Collection::create(dir.path(), "c").unwrap();
        coll.add_raw("d", b"abc".to_vec(), Attributes::new()).unwrap();
    }
    fs::write(dir.path().join("docs/d.ann"), "1\ttoken\tt-1\t0:99\t\n").unwrap();
    let coll = Collection::open(dir.path()).unwrap();
    assert!(matches!(coll.document("d"), Err(StoreError::CorruptDocument { .. })));
}

#[test]
fn workspace_lists_and_rejects_bad_names() {
    let dir = tempdir().unwrap();
    let ws = Workspace::new(dir.path().join("missing-yet"));
    assert!(ws.list().unwrap().is_empty());
    ws.create_collection("b").unwrap();
    ws.create_collection("a").unwrap();
    assert_eq!(ws.list().unwrap(), ["a", "b"]);
    for bad in ["", "..", ".", "x/y"] {
        assert!(matches!(ws.create_collection(bad), Err(StoreError::InvalidName(_))), "{bad:?}");
    }
    assert!(matches!(ws.create_collection("a"), Err(StoreError::PathOccupied(_))));
    assert!(matches!(ws.collection("zzz"), Err(StoreError::NoSuchCollection(_))));
}

#[test]
fn documents_load_lazily_and_share_handles() {
    let dir = tempdir().unwrap();
    {
        let coll = Collection::create(dir.path(), "c").unwrap();
        coll.add_document(Document::new("d", &b"x"[..], Attributes::new()).unwrap())
            .unwrap();
    }
    let coll = Collection::open(dir.path()).unwrap();
    let a = coll.document("d").unwrap();
    let b = coll.document("d").unwrap();
    assert!(std::sync::Arc::ptr_eq(&a, &b));
}
