//! The "GLC1" bitstream container: a checksummed little-endian header
//! followed by the hyper-latent and main-latent payloads, in decode order.

use std::sync::OnceLock;

use crate::alphabet::SymbolAlphabet;
use crate::error::{Error, Result};

pub const CONTAINER_MAGIC: [u8; 4] = *b"GLC1";
/// Version 1 fixes raster coding order: channel-major, then rows, then
/// columns.
pub const CONTAINER_VERSION: u16 = 1;
/// Header flag: the container carries a hyper-latent sub-stream.
pub const FLAG_HAS_HYPER: u16 = 0x0001;

const HEADER_LEN: usize = 4 + 2 + 2 + 2 + 4 + 4 + 2 + 2 + 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerHeader {
    pub version: u16,
    pub flags: u16,
    pub channels: u16,
    pub height: u32,
    pub width: u32,
    pub alphabet: SymbolAlphabet,
    pub model_id: [u8; 8],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub header: ContainerHeader,
    pub hyper_payload: Vec<u8>,
    pub main_payload: Vec<u8>,
}

impl ContainerHeader {
    fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN);
        out.extend_from_slice(&CONTAINER_MAGIC);
        out.extend_from_slice(&self.version.to_le_bytes());
        out.extend_from_slice(&self.flags.to_le_bytes());
        out.extend_from_slice(&self.channels.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&(self.alphabet.min() as i16).to_le_bytes());
        out.extend_from_slice(&(self.alphabet.max() as i16).to_le_bytes());
        out.extend_from_slice(&self.model_id);
        out
    }
}

impl Container {
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = self.header.to_bytes();
        let mut out = Vec::with_capacity(
            header.len() + 12 + self.hyper_payload.len() + self.main_payload.len(),
        );
        out.extend_from_slice(&header);
        out.extend_from_slice(&crc32(&header).to_le_bytes());
        out.extend_from_slice(&(self.hyper_payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.hyper_payload);
        out.extend_from_slice(&(self.main_payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.main_payload);
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        if data.len() < HEADER_LEN + 4 {
            return Err(Error::Corruption("container shorter than header".into()));
        }
        if data[0..4] != CONTAINER_MAGIC {
            return Err(Error::Corruption("bad container magic".into()));
        }
        let header_bytes = &data[..HEADER_LEN];
        let stored_crc = u32::from_le_bytes(data[HEADER_LEN..HEADER_LEN + 4].try_into().unwrap());
        if crc32(header_bytes) != stored_crc {
            return Err(Error::Corruption("header checksum mismatch".into()));
        }
        let version = u16::from_le_bytes([data[4], data[5]]);
        if version != CONTAINER_VERSION {
            return Err(Error::Corruption(format!(
                "unsupported container version {version}"
            )));
        }
        let flags = u16::from_le_bytes([data[6], data[7]]);
        let channels = u16::from_le_bytes([data[8], data[9]]);
        let height = u32::from_le_bytes(data[10..14].try_into().unwrap());
        let width = u32::from_le_bytes(data[14..18].try_into().unwrap());
        let amin = i16::from_le_bytes([data[18], data[19]]) as i32;
        let amax = i16::from_le_bytes([data[20], data[21]]) as i32;
        let alphabet = SymbolAlphabet::new(amin, amax)
            .map_err(|e| Error::Corruption(format!("invalid alphabet in header: {e}")))?;
        let mut model_id = [0u8; 8];
        model_id.copy_from_slice(&data[22..30]);

        let mut pos = HEADER_LEN + 4;
        let hyper_payload = read_block(data, &mut pos, "hyper")?;
        let main_payload = read_block(data, &mut pos, "main")?;
        if pos != data.len() {
            return Err(Error::Corruption(format!(
                "{} trailing bytes after payloads",
                data.len() - pos
            )));
        }
        Ok(Self {
            header: ContainerHeader {
                version,
                flags,
                channels,
                height,
                width,
                alphabet,
                model_id,
            },
            hyper_payload,
            main_payload,
        })
    }

    pub fn payload_bits(&self) -> u64 {
        8 * (self.hyper_payload.len() + self.main_payload.len()) as u64
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

fn read_block(data: &[u8], pos: &mut usize, name: &str) -> Result<Vec<u8>> {
    if data.len() < *pos + 4 {
        return Err(Error::Corruption(format!("missing {name} payload length")));
    }
    let len = u32::from_le_bytes(data[*pos..*pos + 4].try_into().unwrap()) as usize;
    *pos += 4;
    if data.len() < *pos + len {
        return Err(Error::Corruption(format!(
            "{name} payload truncated: need {len} bytes, have {}",
            data.len() - *pos
        )));
    }
    let block = data[*pos..*pos + len].to_vec();
    *pos += len;
    Ok(block)
}

/// CRC-32 (IEEE, reflected), table computed on first use.
pub fn crc32(data: &[u8]) -> u32 {
    static TABLE: OnceLock<[u32; 256]> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut table = [0u32; 256];
        for (i, entry) in table.iter_mut().enumerate() {
            let mut c = i as u32;
            for _ in 0..8 {
                c = if c & 1 != 0 { 0xEDB8_8320 ^ (c >> 1) } else { c >> 1 };
            }
            *entry = c;
        }
        table
    });
    let mut crc = 0xFFFF_FFFFu32;
    for &b in data {
        crc = table[((crc ^ b as u32) & 0xFF) as usize] ^ (crc >> 8);
    }
    !crc
}
