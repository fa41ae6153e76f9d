import pytest


@pytest.fixture()
def sentences_file(tmp_path):
    path = tmp_path / "sentences.txt"
    path.write_text("记得戴眼睛\n运动过读\n他在看书\n", encoding="utf-8")
    return path


@pytest.fixture()
def neighbors_file(tmp_path):
    path = tmp_path / "neighbors.tsv"
    path.write_text("#beta=0.7 threshold=0.5\n睛\t镜\n度\t读\n", encoding="utf-8")
    return path
