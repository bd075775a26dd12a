from pathlib import Path

import pytest

from baitline.corpus import Corpus, Label, NewsArticle

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


def make_article(i: int, label=Label.NON_CLICKBAIT, source="alfa-news",
                 title="ana are mere bune", content="ana cumpara mere. merele sunt bune."):
    return NewsArticle(id=f"a{i}", title=title, content=content, source=source, label=label)


@pytest.fixture
def tiny_corpus() -> Corpus:
    return Corpus(
        (
            make_article(0, Label.CLICKBAIT, "alfa-news", title="nu vei crede ce a urmat!"),
            make_article(1, Label.NON_CLICKBAIT, "beta-press"),
            make_article(2, Label.CLICKBAIT, "beta-press", title="secretul care schimba totul?"),
            make_article(3, Label.NON_CLICKBAIT, "alfa-news"),
        ),
        name="tiny",
    )
