//! The problem instance: revenues, availability domain, a choice model, and
//! provenance metadata. Instances serialize to a documented JSON format and
//! are the unit every solver call takes.

use serde::{Deserialize, Serialize};

use crate::choice::{
    ChoiceModel, ChoiceProbabilities, RefinementDomain, RefinementVector, RevenueVector,
};
use crate::error::{Error, Result};
use crate::lcmnl::LcmnlModel;
use crate::rcs::RcsModel;

/// Tagged choice-model parameters: `{"kind": "lcmnl"|"rcs", "params": {…}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum ChoiceModelSpec {
    Lcmnl(LcmnlModel),
    Rcs(RcsModel),
}

impl ChoiceModel for ChoiceModelSpec {
    fn num_products(&self) -> usize {
        match self {
            ChoiceModelSpec::Lcmnl(m) => m.num_products(),
            ChoiceModelSpec::Rcs(m) => m.num_products(),
        }
    }

    fn choice_probabilities(&self, x: &RefinementVector) -> ChoiceProbabilities {
        match self {
            ChoiceModelSpec::Lcmnl(m) => m.choice_probabilities(x),
            ChoiceModelSpec::Rcs(m) => m.choice_probabilities(x),
        }
    }
}

/// Generator provenance carried by every instance so runs can be replayed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    /// Where the instance came from (generator or construction name).
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Full generator configuration, when applicable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub r: RevenueVector,
    pub domain: RefinementDomain,
    pub model: ChoiceModelSpec,
    #[serde(default)]
    pub metadata: Metadata,
}

impl Instance {
    pub fn new(
        r: RevenueVector,
        domain: RefinementDomain,
        model: ChoiceModelSpec,
        metadata: Metadata,
    ) -> Result<Self> {
        let instance = Instance {
            n: r.len(),
            r,
            domain,
            model,
            metadata,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: self.r.len(),
            });
        }
        if self.model.num_products() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: self.model.num_products(),
            });
        }
        if self.domain.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: self.domain.len(),
            });
        }
        self.domain.validate()
    }

    pub fn lcmnl(&self) -> Option<&LcmnlModel> {
        match &self.model {
            ChoiceModelSpec::Lcmnl(m) => Some(m),
            ChoiceModelSpec::Rcs(_) => None,
        }
    }

    pub fn rcs(&self) -> Option<&RcsModel> {
        match &self.model {
            ChoiceModelSpec::Rcs(m) => Some(m),
            ChoiceModelSpec::Lcmnl(_) => None,
        }
    }

    /// Purchase probabilities at availability `x`.
    pub fn probabilities(&self, x: &RefinementVector) -> Result<ChoiceProbabilities> {
        if x.len() != self.n {
            return Err(Error::InvalidRefinement(format!(
                "availability vector has {} entries, instance has {}",
                x.len(),
                self.n
            )));
        }
        Ok(self.model.choice_probabilities(x))
    }

    /// Expected revenue `R(x) = r'p(x)`.
    pub fn revenue(&self, x: &RefinementVector) -> Result<f64> {
        Ok(self.probabilities(x)?.expected_revenue(&self.r))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let instance: Instance = serde_json::from_str(json)?;
        instance.validate()?;
        Ok(instance)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Expected revenue of an instance at a given availability vector.
pub fn expected_revenue(instance: &Instance, x: &RefinementVector) -> Result<f64> {
    instance.revenue(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_gen::example_instances;

    #[test]
    fn example2_expected_revenue() {
        let instance = example_instances().example2;
        let taop = instance
            .revenue(&RefinementVector::new(vec![1.0, 1.0, 0.0]).unwrap())
            .unwrap();
        assert!((taop - 66.24).abs() < 0.05);
        let refined = instance
            .revenue(&RefinementVector::new(vec![1.0, 0.06, 1.0]).unwrap())
            .unwrap();
        assert!((refined - 71.06).abs() < 0.05);
    }

    #[test]
    fn empty_offer_earns_nothing() {
        let instance = example_instances().example2;
        let rev = instance.revenue(&RefinementVector::zeros(3)).unwrap();
        assert_eq!(rev, 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let instance = example_instances().example2;
        assert!(matches!(
            instance.revenue(&RefinementVector::ones(2)),
            Err(Error::InvalidRefinement(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let instance = example_instances().example2;
        let json = instance.to_json_pretty().unwrap();
        let back = Instance::from_json(&json).unwrap();
        assert_eq!(back, instance);
    }

    #[test]
    fn probability_mass_sums_to_one() {
        let instance = example_instances().example2;
        for x in [
            RefinementVector::ones(3),
            RefinementVector::new(vec![1.0, 0.06, 1.0]).unwrap(),
            RefinementVector::new(vec![0.3, 0.0, 0.9]).unwrap(),
        ] {
            let p = instance.probabilities(&x).unwrap();
            assert!((p.total() - 1.0).abs() <= 1e-9);
        }
    }
}
