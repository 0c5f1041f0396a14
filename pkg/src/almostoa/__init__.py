"""Request-a-copy workflow service for closed-access repository deposits.

Deposits are captured at acceptance time whether open or closed; closed
ones stay requestable copy-by-copy through a tokenized author-approval
email loop, embargoes expire into open access automatically, a fairness
monitor warns (never blocks), and the reporter reproduces the usage
tables operators care about.
"""

from .config import RepositoryConfig, config_from_dict, load_config
from .errors import (
    AttestationRequired,
    DecisionConflict,
    InvalidAddress,
    InvalidPeriod,
    InvalidTransition,
    NotFound,
    NotRequestable,
    RepositoryError,
    StorageError,
    TransportError,
    UnknownToken,
    ValidationError,
)
from .fairness import BUILTIN_PROFILES, FairnessMonitor, JurisdictionProfile
from .model import (
    AccessKind,
    AccessState,
    AlertKind,
    CopyRequest,
    Decision,
    DecisionState,
    DecisionToken,
    Depositor,
    DocumentPart,
    EprintMetadata,
    EprintRecord,
    FairnessAlert,
    MailKind,
    MailMessage,
    Purpose,
    PurposeKind,
    VenueKind,
    VenueRef,
)
from .service import ManualClock, Repository, SystemClock, open_repository
from .workflow import ResponseClass, classify_response

__version__ = "0.1.0"
