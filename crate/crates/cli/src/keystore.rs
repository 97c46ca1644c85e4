//! Keystore directory layout.
//!
//! ```text
//! <dir>/public.key          public key (distributable)
//! <dir>/do/secret.key       private key, data owner only
//! <dir>/s0/assisted.rec     S0's assisted tuple
//! <dir>/s0/upload-<n>.rec   S0's record for upload slot n
//! <dir>/s1/...              the same for S1
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use hss_core::protocols::{AssistedTuple, UploadRecord};
use hss_core::wire::KeystoreRecord;
use hss_core::{PrivateKey, PublicKey, Role};

use crate::CliError;

pub const PUBLIC_KEY: &str = "public.key";
pub const SECRET_KEY: &str = "do/secret.key";

pub fn server_dir(dir: &Path, role: Role) -> PathBuf {
    dir.join(match role {
        Role::S0 => "s0",
        Role::S1 => "s1",
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

#[cfg(unix)]
fn restrict(path: &Path) -> Result<(), CliError> {
    use std::os::unix::fs::PermissionsExt;
    fs::set_permissions(path, fs::Permissions::from_mode(0o600)).map_err(|e| CliError::io(path, e))
}

#[cfg(not(unix))]
fn restrict(_: &Path) -> Result<(), CliError> {
    Ok(())
}

pub fn write_keys(
    dir: &Path,
    pk: &PublicKey,
    sk: &PrivateKey,
    assisted: (&AssistedTuple, &AssistedTuple),
) -> Result<(), CliError> {
    write(
        &dir.join(PUBLIC_KEY),
        &KeystoreRecord::PublicKey(pk.clone()).encode(None)?,
    )?;
    let sk_path = dir.join(SECRET_KEY);
    write(
        &sk_path,
        &KeystoreRecord::SecretKey(sk.clone()).encode(None)?,
    )?;
    restrict(&sk_path)?;
    for a in [assisted.0, assisted.1] {
        write(
            &server_dir(dir, a.role).join("assisted.rec"),
            &KeystoreRecord::Assisted(a.clone()).encode(Some(pk))?,
        )?;
    }
    Ok(())
}

pub fn load_public(dir: &Path) -> Result<PublicKey, CliError> {
    match KeystoreRecord::decode(&read(&dir.join(PUBLIC_KEY))?, None)? {
        KeystoreRecord::PublicKey(pk) => Ok(pk),
        other => Err(CliError::Usage(format!(
            "{} holds a {:?} record",
            dir.join(PUBLIC_KEY).display(),
            other.kind()
        ))),
    }
}

pub fn load_keys(dir: &Path) -> Result<(PublicKey, PrivateKey), CliError> {
    let pk = load_public(dir)?;
    match KeystoreRecord::decode(&read(&dir.join(SECRET_KEY))?, None)? {
        KeystoreRecord::SecretKey(sk) if sk.n() == pk.n() => Ok((pk, sk)),
        KeystoreRecord::SecretKey(_) => Err(CliError::Usage(
            "secret key does not match the public key".into(),
        )),
        other => Err(CliError::Usage(format!(
            "{} holds a {:?} record",
            dir.join(SECRET_KEY).display(),
            other.kind()
        ))),
    }
}

fn upload_path(dir: &Path, role: Role, slot: u32) -> PathBuf {
    server_dir(dir, role).join(format!("upload-{slot}.rec"))
}

/// Lowest slot with no record on either server.
pub fn next_slot(dir: &Path) -> u32 {
    (0..)
        .find(|&s| {
            !upload_path(dir, Role::S0, s).exists() && !upload_path(dir, Role::S1, s).exists()
        })
        .expect("slot space exhausted")
}

pub fn write_upload(
    dir: &Path,
    pk: &PublicKey,
    slot: u32,
    records: (&UploadRecord, &UploadRecord),
) -> Result<(PathBuf, PathBuf), CliError> {
    let mut paths = Vec::new();
    for (role, record) in [(Role::S0, records.0), (Role::S1, records.1)] {
        let path = upload_path(dir, role, slot);
        let rec = KeystoreRecord::Upload {
            slot,
            record: record.clone(),
        };
        write(&path, &rec.encode(Some(pk))?)?;
        paths.push(path);
    }
    let p1 = paths.pop().expect("two paths");
    let p0 = paths.pop().expect("two paths");
    Ok((p0, p1))
}

pub fn read_upload(
    dir: &Path,
    pk: &PublicKey,
    role: Role,
    slot: u32,
) -> Result<UploadRecord, CliError> {
    let path = upload_path(dir, role, slot);
    match KeystoreRecord::decode(&read(&path)?, Some(pk))? {
        KeystoreRecord::Upload { record, .. } => Ok(record),
        other => Err(CliError::Usage(format!(
            "{} holds a {:?} record",
            path.display(),
            other.kind()
        ))),
    }
}
