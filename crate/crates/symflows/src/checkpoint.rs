//! Versioned parameter dumps with the `SYMFLOWS1` magic header. The body
//! is the backend's own text dump (see the model types' `save`/`load`).

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const MAGIC: &str = "SYMFLOWS1";

pub fn write_checkpoint<F>(path: &Path, body: F) -> io::Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{MAGIC}")?;
    body(&mut w)?;
    w.flush()
}

/// Opens a checkpoint, verifies the magic line, and returns a reader
/// positioned at the backend body.
pub fn open_checkpoint(path: &Path) -> io::Result<BufReader<File>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = String::new();
    r.read_line(&mut magic)?;
    if magic.trim() != MAGIC {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("bad checkpoint magic: expected {MAGIC}"),
        ));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magic_round_trip() {
        let dir = std::env::temp_dir().join(format!("symflows-ckpt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.ckpt");
        write_checkpoint(&path, |w| writeln!(w, "body")).unwrap();
        let mut r = open_checkpoint(&path).unwrap();
        let mut line = String::new();
        r.read_line(&mut line).unwrap();
        assert_eq!(line.trim(), "body");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = std::env::temp_dir().join(format!("symflows-ckpt2-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.ckpt");
        std::fs::write(&path, "NOTMAGIC\n").unwrap();
        assert!(open_checkpoint(&path).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
