//! `--model` mini-grammar: `kstar:K | kclique:K | kbroadcast:K | ker:K |
//! fixed:FILE | mix:FILE`.

use persuasion_core::{Error, LeakageModel, LeakagePattern, MixtureComponent, Result};

pub fn parse_model(spec: &str) -> Result<LeakageModel> {
    let (kind, arg) =
        spec.split_once(':').ok_or_else(|| Error::Domain(format!("model {spec:?} is not KIND:ARG")))?;
    let k = || -> Result<usize> {
        arg.trim().parse().map_err(|_| Error::Domain(format!("model {spec:?}: {arg:?} is not a count")))
    };
    let file = || -> Result<String> {
        std::fs::read_to_string(arg).map_err(|e| Error::Domain(format!("{arg}: {e}")))
    };
    Ok(match kind.trim() {
        "kstar" => LeakageModel::KStar { k: k()? },
        "kclique" => LeakageModel::KClique { k: k()? },
        "kbroadcast" => LeakageModel::KBroadcast { k: k()? },
        "ker" => LeakageModel::KErdosRenyi { k: k()? },
        "fixed" => LeakageModel::Fixed { pattern: serde_json::from_str::<LeakagePattern>(&file()?)? },
        "mix" => {
            // a bare component list, or a full mixture model document
            let text = file()?;
            match serde_json::from_str::<Vec<MixtureComponent>>(&text) {
                Ok(components) => LeakageModel::Mixture { components },
                Err(_) => match serde_json::from_str::<LeakageModel>(&text)? {
                    m @ LeakageModel::Mixture { .. } => m,
                    _ => return Err(Error::Domain(format!("{arg}: not a mixture"))),
                },
            }
        }
        other => return Err(Error::Domain(format!("unknown model kind {other:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_model("kstar:2").unwrap(), LeakageModel::KStar { k: 2 });
        assert_eq!(parse_model("ker:1").unwrap(), LeakageModel::KErdosRenyi { k: 1 });
        assert!(parse_model("kstar").is_err());
        assert!(parse_model("ring:2").is_err());
        assert!(parse_model("kclique:x").is_err());
    }
}
