import os

FLOAT_FORMAT = "%.17g"


def save_dataframe(df, csv_filepath, label, header_lines=None, header=True):
    """
    Write a study table to CSV with 17 significant digits.

    Args:
        df (pd.DataFrame): Table to write.
        csv_filepath (str): Output path; missing directories are created.
        label (str): What the table is, for the confirmation message.
        header_lines (list of str, optional): Comment lines written first, each prefixed with "# ".
        header (bool, optional): Whether to write the column names. Default is True.

    Returns:
        str: The path written.

    Example:
        >>> save_dataframe(report, "out/verify.csv", "Verification report", header_lines=["seed=0"])
        ✅ Verification report has been saved to 'out/verify.csv'.
    """
    if os.path.dirname(csv_filepath):
        os.makedirs(os.path.dirname(csv_filepath), exist_ok=True)
    with open(csv_filepath, "w", encoding="utf-8", newline="") as f:
        for line in header_lines or []:
            f.write(f"# {line}\n")
        df.to_csv(f, index=False, header=header, float_format=FLOAT_FORMAT, lineterminator="\n")
    print(f"✅ {label} has been saved to '{csv_filepath}'.")
    return csv_filepath


def companion_path(csv_filepath, suffix):
    """'<dir>/<stem>.csv' -> '<dir>/<stem>_<suffix>.csv'."""
    stem, _ = os.path.splitext(csv_filepath)
    return f"{stem}_{suffix}.csv"
