from app.utils.files_utils import resolve_output_dir, write_csv, write_json, write_manifest


__all__ = ["resolve_output_dir", "write_csv", "write_json", "write_manifest"]
