"""
数据处理工具
实例/样本文件读写与内容摘要，JSON/YAML/CSV 辅助
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd
import yaml
from loguru import logger

PathLike = Union[str, Path]


def sha256_text(text: str) -> str:
    """文本内容的 sha256 十六进制摘要"""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class DataHandler:
    """数据处理器"""

    def __init__(self, base_dir: Optional[Path] = None):
        """初始化数据处理器

        Args:
            base_dir: 相对路径的基准目录，默认当前目录
        """
        self.base_dir = base_dir or Path.cwd()

    def resolve(self, path: PathLike) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.base_dir / path

    def read_text(self, path: PathLike) -> Tuple[str, str]:
        """读取文本文件

        Returns:
            (内容, sha256 摘要)
        """
        file_path = self.resolve(path)
        try:
            text = file_path.read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"读取文件失败 {file_path}: {e}")
            raise
        logger.debug(f"读取文件: {file_path}")
        return text, sha256_text(text)

    def write_text(self, path: PathLike, text: str) -> str:
        """写入文本文件(统一 \\n 换行)

        Returns:
            sha256 摘要
        """
        file_path = self.resolve(path)
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            with open(file_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        except OSError as e:
            logger.error(f"写入文件失败 {file_path}: {e}")
            raise
        logger.info(f"已写入: {file_path}")
        return sha256_text(text)

    def digest(self, path: PathLike) -> str:
        return self.read_text(path)[1]

    def load_json(self, path: PathLike) -> Any:
        text, _ = self.read_text(path)
        return json.loads(text)

    def save_json(self, data: Any, path: PathLike) -> str:
        """确定性 JSON: 键排序、缩进 2"""
        return self.write_text(path, json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n")

    def load_yaml(self, path: PathLike) -> Dict[str, Any]:
        text, _ = self.read_text(path)
        return yaml.safe_load(text) or {}

    def save_yaml(self, data: Dict[str, Any], path: PathLike) -> str:
        return self.write_text(path, yaml.safe_dump(data, default_flow_style=False, allow_unicode=True, sort_keys=True))

    def save_csv(self, rows: List[Dict[str, Any]], path: PathLike) -> bool:
        """用 pandas 保存逐行记录

        Returns:
            是否保存成功
        """
        if not rows:
            logger.warning("数据为空，无法保存CSV文件")
            return False
        file_path = self.resolve(path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(rows).to_csv(file_path, index=False, lineterminator="\n")
        logger.info(f"CSV文件保存成功: {file_path}, 共{len(rows)}行")
        return True

    def load_csv(self, path: PathLike) -> List[Dict[str, Any]]:
        return pd.read_csv(self.resolve(path)).to_dict("records")


# 全局数据处理器实例
data_handler = DataHandler()
