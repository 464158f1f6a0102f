"""
Schema definitions for the tables written by planar-beltrami.

Every CSV file the command-line tool writes has one of these schemas; the
column order here is the header order on disk, and the same schemas drive
the typed read-back in export.read_table.
"""

import pyarrow as pa

# Bumped whenever a column is renamed, retyped or removed
SCHEMA_VERSION = "1.0.0"

# =============================================================================
# Tables
# =============================================================================

# Sampled vector field of one basis element or fitted series
FIELD_SCHEMA = pa.schema(
    [
        pa.field("x", pa.float64(), nullable=False, metadata={"comment": "Probe abscissa"}),
        pa.field("y", pa.float64(), nullable=False, metadata={"comment": "Probe ordinate"}),
        pa.field("B1", pa.float64(), metadata={"comment": "-(1/alpha) dB3/dy"}),
        pa.field("B2", pa.float64(), metadata={"comment": "(1/alpha) dB3/dx"}),
        pa.field("B3", pa.float64(), metadata={"comment": "Scalar solution"}),
    ]
)

# One verification check per row
RESIDUAL_SCHEMA = pa.schema(
    [
        pa.field("element", pa.string(), metadata={"comment": "Basis element name, if any"}),
        pa.field("check", pa.string(), nullable=False, metadata={"comment": "Residual name"}),
        pa.field("value", pa.float64(), nullable=False, metadata={"comment": "Sup residual"}),
        pa.field("threshold", pa.float64(), nullable=False, metadata={"comment": "Limit"}),
        pa.field("passed", pa.bool_(), nullable=False, metadata={"comment": "value < threshold"}),
    ]
)

# Series coefficients of a collocation fit
COEFFICIENT_SCHEMA = pa.schema(
    [
        pa.field("index", pa.int64(), nullable=False, metadata={"comment": "Basis position"}),
        pa.field("name", pa.string(), nullable=False, metadata={"comment": "B3[n,u|v]"}),
        pa.field("n", pa.int64(), nullable=False, metadata={"comment": "Formal power order"}),
        pa.field("flavor", pa.string(), nullable=False, metadata={"comment": "u (a=1), v (a=i)"}),
        pa.field("coefficient", pa.float64(), nullable=False, metadata={"comment": "Weight"}),
    ]
)

# Closed-form comparison of the inverse square-root profile
EXAMPLE_SCHEMA = pa.schema(
    [
        pa.field("quantity", pa.string(), nullable=False, metadata={"comment": "Compared item"}),
        pa.field("max_deviation", pa.float64(), nullable=False, metadata={"comment": "Sup error"}),
        pa.field("threshold", pa.float64(), nullable=False, metadata={"comment": "Limit"}),
    ]
)

# =============================================================================
# Registry
# =============================================================================

TABLES: dict[str, pa.Schema] = {
    "field": FIELD_SCHEMA,
    "residuals": RESIDUAL_SCHEMA,
    "coefficients": COEFFICIENT_SCHEMA,
    "example": EXAMPLE_SCHEMA,
}

TABLE_DESCRIPTIONS: dict[str, str] = {
    "field": "Samples of (B1, B2, B3) on a probe grid",
    "residuals": "Verification checks with thresholds",
    "coefficients": "Series coefficients in basis order",
    "example": "Numeric against closed-form deviations",
}


# =============================================================================
# Lookup
# =============================================================================


def get_table_schema(table_name: str) -> pa.Schema:
    """Schema registered under table_name; ValueError for unknown names."""
    try:
        return TABLES[table_name]
    except KeyError:
        raise ValueError(f"Unknown table: {table_name}. Known tables: {sorted(TABLES)}") from None


def get_table_names() -> list[str]:
    return list(TABLES)


def get_field_names(table_name: str) -> list[str]:
    """Column names of a table in header order."""
    return get_table_schema(table_name).names
