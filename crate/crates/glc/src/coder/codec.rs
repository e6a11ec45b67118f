//! Ties the model, the CDF tables, and the container together. The hyper
//! latent is coded first so a full decoder could condition the main latent
//! on it.

use crate::coder::container::{Container, ContainerHeader, CONTAINER_VERSION, FLAG_HAS_HYPER};
use crate::coder::table::CdfTable;
use crate::coder::{decode_tensor, encode_tensor};
use crate::error::{Error, Result};
use crate::latent::LatentTensor;
use crate::model::CodecModel;

/// Fixed spatial downsampling between the main latent and the hyper latent.
pub const HYPER_DOWNSAMPLE: u32 = 4;

/// Shape the hyper latent must have for a main latent of the given shape.
pub fn hyper_shape(model: &CodecModel, main: (u16, u32, u32)) -> (u16, u32, u32) {
    let (_, h, w) = main;
    (
        model.hyper_channels() as u16,
        h.div_ceil(HYPER_DOWNSAMPLE),
        w.div_ceil(HYPER_DOWNSAMPLE),
    )
}

fn build_tables(
    model: &CodecModel,
    alphabet: crate::alphabet::SymbolAlphabet,
    precision_bits: u8,
) -> Result<(Vec<CdfTable>, Vec<CdfTable>)> {
    let main = model
        .main_distributions(alphabet)?
        .iter()
        .map(|d| CdfTable::build(d, precision_bits))
        .collect::<Result<Vec<_>>>()?;
    let hyper = model
        .hyper_distributions(alphabet)?
        .iter()
        .map(|d| CdfTable::build(d, precision_bits))
        .collect::<Result<Vec<_>>>()?;
    Ok((main, hyper))
}

/// Entropy-code a main latent (and optionally its hyper latent) into a
/// container.
pub fn compress(
    main: &LatentTensor,
    hyper: Option<&LatentTensor>,
    model: &CodecModel,
    precision_bits: u8,
) -> Result<Container> {
    if main.channels() as usize != model.main_channels() {
        return Err(Error::Shape(format!(
            "tensor has {} channels, model has {}",
            main.channels(),
            model.main_channels()
        )));
    }
    let alphabet = main.alphabet();
    let (main_tables, hyper_tables) = build_tables(model, alphabet, precision_bits)?;

    let (hyper_payload, flags) = match hyper {
        Some(z) => {
            let expected = hyper_shape(model, main.shape());
            if z.shape() != expected {
                return Err(Error::Shape(format!(
                    "hyper tensor shape {:?} does not match expected {:?}",
                    z.shape(),
                    expected
                )));
            }
            if z.alphabet() != alphabet {
                return Err(Error::Shape(
                    "hyper tensor alphabet differs from main tensor".into(),
                ));
            }
            (encode_tensor(z, &hyper_tables)?, FLAG_HAS_HYPER)
        }
        None => (Vec::new(), 0),
    };
    let main_payload = encode_tensor(main, &main_tables)?;

    Ok(Container {
        header: ContainerHeader {
            version: CONTAINER_VERSION,
            flags,
            channels: main.channels(),
            height: main.height(),
            width: main.width(),
            alphabet,
            model_id: model.model_id(),
        },
        hyper_payload,
        main_payload,
    })
}

/// Decode a container back into the main latent (and the hyper latent when
/// present). The model must be the one used to encode.
pub fn decompress(
    container: &Container,
    model: &CodecModel,
    precision_bits: u8,
) -> Result<(LatentTensor, Option<LatentTensor>)> {
    let header = &container.header;
    if header.model_id != model.model_id() {
        return Err(Error::Corruption(
            "model id mismatch: container was encoded with a different model file".into(),
        ));
    }
    if header.channels as usize != model.main_channels() {
        return Err(Error::Corruption(format!(
            "container declares {} channels, model has {}",
            header.channels,
            model.main_channels()
        )));
    }
    let alphabet = header.alphabet;
    let (main_tables, hyper_tables) = build_tables(model, alphabet, precision_bits)?;

    let main_shape = (header.channels, header.height, header.width);
    let hyper = if header.flags & FLAG_HAS_HYPER != 0 {
        let shape = hyper_shape(model, main_shape);
        Some(decode_tensor(
            &container.hyper_payload,
            shape,
            alphabet,
            &hyper_tables,
        )?)
    } else {
        None
    };
    let main = decode_tensor(&container.main_payload, main_shape, alphabet, &main_tables)?;
    Ok((main, hyper))
}
