//! Reading the bundled data files and printing their normalized form.

use std::path::Path;

use invlim::format::{parse_document, print_document};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        let doc = parse_document(&text).unwrap();
        let printed = print_document(&doc);
        let again = print_document(&parse_document(&printed).unwrap());
        println!(
            "{}: {} (fixpoint: {})",
            f.file_name().unwrap().to_string_lossy(),
            doc.summary(),
            printed == again
        );
    }

    let text = std::fs::read_to_string(dir.join("clipdec.tower")).unwrap();
    let doc = parse_document(&text).unwrap();
    println!(
        "\nnormalized clipdec.tower:\n{}",
        print_document(&doc)
            .lines()
            .take(6)
            .collect::<Vec<_>>()
            .join("\n")
    );

    match parse_document("poset P\nelements: a b\ncovers: a < c\n") {
        Ok(_) => unreachable!(),
        Err(e) => println!("\n{e}"),
    }
}
