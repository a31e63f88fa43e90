#!/usr/bin/env python3
"""Regenerates tests/fixtures/mock: images, the 20-task dataset and every
backend table served by the mock backends."""

import json
import pathlib

from PIL import Image, ImageDraw

OUT = pathlib.Path(__file__).resolve().parent / "mock"

IMAGES = {
    # name: (size, background, shapes [(kind, box, color)])
    "campbell.png": ((3630, 2887), (236, 230, 220), [("rect", (1300, 800, 2300, 2300), (200, 20, 30)),
                                                     ("rect", (1300, 1500, 2300, 2300), (245, 245, 245))]),
    "sushiro.jpg": ((1600, 1200), (250, 200, 60), [("ellipse", (500, 300, 1100, 900), (210, 40, 40))]),
    "car.png": ((800, 600), (120, 160, 200), [("rect", (150, 300, 650, 480), (220, 20, 20))]),
    "cat.png": ((640, 480), (90, 140, 80), [("ellipse", (200, 120, 440, 400), (60, 60, 60))]),
    "fruit.png": ((1024, 768), (140, 90, 50), [("ellipse", (300, 250, 700, 450), (250, 220, 40))]),
    "busstop.png": ((1280, 960), (180, 180, 190), [("rect", (100 + 300 * i, 300, 260 + 300 * i, 800), (40, 40, 90))
                                                   for i in range(3)]),
    "door.png": ((900, 1200), (170, 120, 80), [("rect", (300, 200, 600, 320), (20, 160, 60))]),
    "menu.png": ((1100, 1500), (250, 245, 230), [("rect", (150, 150 + 180 * i, 950, 250 + 180 * i), (30, 30, 30))
                                                 for i in range(6)]),
    "plant.png": ((1536, 2048), (230, 230, 225), [("ellipse", (400, 500, 1100, 1500), (30, 120, 50))]),
    "phone.png": ((1200, 1600), (60, 60, 70), [("rect", (400, 400, 800, 1200), (15, 15, 20))]),
    "paris.png": ((2400, 1600), (150, 190, 230), [("rect", (300, 200, 500, 1500), (120, 100, 80)),
                                                  ("rect", (1500, 700, 2100, 1500), (200, 190, 160))]),
    "museum.png": ((1400, 1050), (210, 200, 180), [("rect", (200, 300, 1200, 900), (160, 150, 140))]),
    "tower_old.png": ((700, 900), (200, 220, 240), [("rect", (300, 100, 400, 850), (100, 80, 70))]),
    "street.png": ((1000, 750), (100, 100, 100), [("rect", (0, 500, 1000, 750), (50, 50, 50))]),
    "clock.png": ((1300, 1300), (240, 240, 240), [("ellipse", (300, 300, 1000, 1000), (20, 20, 20))]),
    "bus_hk.png": ((2000, 1500), (200, 60, 60), [("rect", (400, 500, 1600, 1100), (240, 200, 30))]),
    "duck.png": ((1024, 1536), (80, 130, 170), [("ellipse", (300, 600, 700, 900), (90, 70, 40))]),
    "station.png": ((1920, 1080), (90, 90, 110), [("rect", (700, 200, 1200, 700), (20, 120, 60))]),
    "whiteboard.png": ((1200, 900), (250, 250, 250), [("rect", (300, 400, 900, 500), (0, 0, 200))]),
    "mushroom.png": ((512, 384), (60, 90, 40), [("ellipse", (180, 100, 330, 200), (220, 30, 30))]),
}


def resized_size(size, target=1024):
    w, h = size
    s = min(w, h)
    if s <= target:
        return size
    if w <= h:
        return target, round(h * target / w)
    return round(w * target / h), target


def page(title, paragraphs):
    body = "\n".join(f"<p>{p}</p>" for p in paragraphs)
    return (f"<!DOCTYPE html>\n<html><head><title>{title}</title>\n"
            "<script>var tracker = {id: 42};</script><style>p { margin: 0 }</style></head>\n"
            "<body><nav><a href=\"/\">Home</a> | <a href=\"/about\">About</a></nav>\n"
            f"<article><h1>{title}</h1>\n{body}\n</article>\n"
            "<footer>Content is available under a free license. Cookie settings.</footer></body></html>\n")


PAGES = {
    "https://en.wikipedia.org/wiki/Campbell%27s": page("Campbell's", [
        "The Campbell's Company (doing business as Campbell's) is an American processed food company.",
        "Its flagship canned products are condensed soups sold across North America."]),
    "https://en.wikipedia.org/wiki/Campbell%27s_Soup_Cans": page("Campbell's Soup Cans", [
        "Campbell's Soup Cans is a series of 32 paintings (1961&ndash;62) by the American pop-art artist Andy Warhol, "
        "each canvas depicting a Campbell's soup can and now considered an icon of pop art.",
        "The renowned series was painted in Warhol's New York studio."]),
    "https://en.wikipedia.org/wiki/Andy_Warhol": page("Andy Warhol", [
        "Andy Warhol was an American visual artist, film director and producer, widely regarded as a leading figure "
        "of the pop art movement.",
        "Andy Warhol was an American artist; he is generally considered one of the most influential U.S. figures in "
        "20th-century art. His home country was the United States, where he painted the Campbell's soup can series."]),
    "https://en.wikipedia.org/wiki/Sushiro": page("Sushiro", [
        "Sushiro is a Japanese conveyor belt sushi restaurant chain with branches in Hong Kong.",
        "The chain was founded in 1984 in Osaka by two founders, the brothers Yoshiaki and Akira Shimizu."]),
    "https://www.sushiro.com.hk/en/about": page("About Sushiro Hong Kong", [
        "Sushiro opened its first Hong Kong restaurant in 2018 in Sham Shui Po.",
        "Menu prices and opening hours vary by branch."]),
    "https://en.wikipedia.org/wiki/Monstera_deliciosa": page("Monstera deliciosa", [
        "Monstera deliciosa, the Swiss cheese plant, is a species of flowering plant native to tropical forests.",
        "Its common name refers to the holes in its large split leaves; the monstera is a popular house plant."]),
    "https://www.gardening.example/houseplants": page("Houseplants for beginners", [
        "Water most houseplants once a week and keep them out of direct sun.",
        "Repot every two years in spring."]),
    "https://en.wikipedia.org/wiki/Nokia_3310": page("Nokia 3310", [
        "The Nokia 3310 is a mobile phone made by the company Nokia and released in September 2000.",
        "Nokia makes the phone in Finland; the handset is known for its durability and the game Snake."]),
    "https://en.wikipedia.org/wiki/Eiffel_Tower": page("Eiffel Tower", [
        "The Eiffel Tower is a wrought-iron lattice tower in Paris, 330 metres tall, and taller than any cathedral "
        "in the city.",
        "Of the two landmarks on the Seine, the tower is the taller one."]),
    "https://en.wikipedia.org/wiki/Notre-Dame_de_Paris": page("Notre-Dame de Paris", [
        "Notre-Dame de Paris is a medieval Catholic cathedral whose towers are 69 metres tall.",
        "The cathedral is one of the most visited landmarks in Paris."]),
    "https://en.wikipedia.org/wiki/British_Museum": page("British Museum", [
        "The British Museum is a public museum in London founded in 1753.",
        "Its Greek Revival building was designed by the architect Robert Smirke."]),
    "https://en.wikipedia.org/wiki/Robert_Smirke_(architect)": page("Robert Smirke", [
        "Sir Robert Smirke was an English architect who designed the British Museum building.",
        "He was a leading figure of the Greek Revival."]),
    "https://www.history.example/clocktowers": page("Clock towers of Europe", [
        "Clock towers became common in European market squares during the fourteenth century.",
        "Many were rebuilt after fires."]),
    "https://en.wikipedia.org/wiki/Citybus_route_A11": page("Citybus route A11", [
        "Citybus route A11 is an airport bus route from Central to Hong Kong International Airport.",
        "Take the A11 bus from the Central stop; buses run every 20 minutes."]),
    "https://en.wikipedia.org/wiki/Mallard": page("Mallard", [
        "The mallard is a dabbling duck that breeds throughout the temperate Americas and Eurasia.",
        "The average lifespan of a wild mallard is 5 to 10 years; this bird can live longer in captivity."]),
    "https://en.wikipedia.org/wiki/Shibuya_Station": page("Shibuya Station", [
        "Shibuya Station is a major railway station in Tokyo.",
        "Famous landmarks near the station include the Hachiko statue and the Shibuya Scramble Crossing."]),
    "https://en.wikipedia.org/wiki/Hachik%C5%8D": page("Hachiko", [
        "Hachiko was a Japanese Akita dog remembered for his loyalty.",
        "A bronze statue of Hachiko stands at Shibuya Station and is one of the famous landmarks of Tokyo."]),
    "https://en.wikipedia.org/wiki/Shibuya_Crossing": page("Shibuya Crossing", [
        "Shibuya Scramble Crossing is a popular scramble crossing near Shibuya Station.",
        "It is among the famous landmarks of Tokyo."]),
    "https://www.tokyo.example/shibuya-guide": page("Shibuya guide", [
        "A visitor guide to shops, restaurants and famous landmarks near Shibuya Station."]),
    "https://www.tokyo.example/shibuya-sky": page("Shibuya Sky", [
        "Shibuya Sky is an observation deck above Shibuya Station with views of famous landmarks."]),
    "https://en.wikipedia.org/wiki/Amanita_muscaria": page("Amanita muscaria", [
        "Amanita muscaria, the fly agaric, is a poisonous mushroom with a red cap and white spots.",
        "The mushroom is not edible; eating it causes poisoning."]),
}

FAILURE_PAGES = {
    "https://broken.example/missing": {"status": 404},
    "https://broken.example/server-error": {"status": 503},
    "https://slow.example/hang": {"timeout": True},
}


def hit(url, title, snippet):
    return {"url": url, "title": title, "snippet": snippet}


def wiki_hit(url, snippet=""):
    title = url.rsplit("/", 1)[-1].replace("_", " ")
    return hit(url, title, snippet)


# Each task: dataset fields plus "flow" describing what the mock backends answer.
TASKS = [
    dict(id="t01", image="campbell.png", question="Which country is the renowned artist who painted this item from?",
         gold="American", location="Canada", difficulty="Hard", hops=4, category="MultiHop", domain="Food",
         dynamism="Static", glasses="Xiao Mi",
         log=[("What is the item in the image?", "ImageSearch", None, "https://en.wikipedia.org/wiki/Campbell%27s"),
              ("What is the famous painting depicting campbell?", "TextSearch",
               "What is the famous painting depicting campbell?", "https://en.wikipedia.org/wiki/Campbell%27s_Soup_Cans"),
              ("Who paint Campbell's Soup Cans?", "TextSearch", "Who paint Campbell's Soup Cans?",
               "https://en.wikipedia.org/wiki/Andy_Warhol"),
              ("What nationality is Andy Warhol?", "TextSearch", "What nationality is Andy Warhol?",
               "https://en.wikipedia.org/wiki/Andy_Warhol")],
         direct="I have no knowledge about the artist who painted this item.",
         plan={"objects": ["soup can"], "queries": ["Which country is the renowned artist who painted this item from?"]},
         decouple={"Which country is the renowned artist who painted this item from?": [
             "What is the famous painting depicting campbell?", "Who paint Campbell's Soup Cans?",
             "What nationality is Andy Warhol?"]},
         detect={"soup can": [[460, 280, 360, 540, 0.91], [100, 100, 80, 80, 0.32]]},
         image_hits={"soup can": [wiki_hit("https://en.wikipedia.org/wiki/Campbell%27s", "The Campbell's Company")]},
         text_hits={"What is the famous painting depicting campbell?": [
                        wiki_hit("https://en.wikipedia.org/wiki/Campbell%27s_Soup_Cans")],
                    "Who paint Campbell's Soup Cans?": [wiki_hit("https://en.wikipedia.org/wiki/Campbell%27s_Soup_Cans"),
                                                        wiki_hit("https://en.wikipedia.org/wiki/Andy_Warhol")],
                    "What nationality is Andy Warhol?": [wiki_hit("https://en.wikipedia.org/wiki/Andy_Warhol")]},
         captions=["campbell", "soup", "can"],
         evidence="Andy Warhol was an American",
         rag={"reasoning": "The can is Campbell's soup, painted by Andy Warhol, who was American.",
              "answer": "Campbell's is painted by American pop-artist Andy Warhol."}),
    dict(id="t02", image="sushiro.jpg", question="How many founders does this sushi restaurant chain have?",
         gold="two", location="Hong Kong", difficulty="Medium", hops=2, category="FactualKnowledge", domain="Food",
         dynamism="Static", glasses="RayBan Meta",
         log=[("Which restaurant chain is this?", "ImageSearch", None, "https://en.wikipedia.org/wiki/Sushiro"),
              ("How many founders does Sushiro have?", "TextSearch", "Sushiro founders Hong Kong",
               "https://en.wikipedia.org/wiki/Sushiro")],
         direct="I have no knowledge about the founders of Sushiro.",
         plan={"objects": [], "queries": ["Sushiro founders Hong Kong"]},
         decouple={"Sushiro founders Hong Kong": ["Sushiro founders Hong Kong"]},
         text_hits={"Sushiro founders Hong Kong": [
             wiki_hit("https://en.wikipedia.org/wiki/Sushiro", "Sushiro was founded in 1984 by two brothers."),
             hit("https://www.sushiro.com.hk/en/about", "About Sushiro Hong Kong", "Sushiro in Hong Kong.")]},
         captions=["sushiro", "sushi"],
         evidence="two founders",
         rag={"reasoning": "The Sushiro article states it was founded by two brothers.",
              "answer": "Sushiro has two founders."}),
    dict(id="t03", image="car.png", question="What color is the car parked in front?", gold="red",
         difficulty="Easy", hops=1, category="SimpleRecognition", domain="Transport", dynamism="Static",
         glasses="Xiao Mi", log=[],
         direct={"reasoning": "The car in the image is red.", "answer": "Red."}),
    dict(id="t04", image="cat.png", question="What animal is shown in this picture?", gold="cat",
         difficulty="Easy", hops=1, category="SimpleRecognition", domain="Animal", dynamism="Static",
         glasses="RayBan Meta", log=[],
         direct={"reasoning": "A small furry pet with whiskers.", "answer": "A cat."}),
    dict(id="t05", image="fruit.png", question="What fruit is on the table?", gold="banana",
         difficulty="Easy", hops=1, category="SimpleRecognition", domain="Food", dynamism="Static",
         glasses="Xiao Mi", log=[],
         direct={"reasoning": "Yellow curved fruit.", "answer": "Bananas."}),
    dict(id="t06", image="busstop.png", question="How many people are standing at the bus stop?", gold="three",
         difficulty="Medium", hops=1, category="Aggregation", domain="Transport", dynamism="FastChanging",
         glasses="RayBan Meta", log=[],
         direct={"reasoning": "Three figures wait under the shelter.", "answer": "Three people."}),
    dict(id="t07", image="door.png", question="What does the sign above the door say?", gold="Exit",
         difficulty="Easy", hops=1, category="SimpleRecognition", domain="Public Service", dynamism="Static",
         glasses="Xiao Mi", log=[],
         direct={"reasoning": "A green sign with white letters.", "answer": "Exit."}),
    dict(id="t08", image="menu.png", question="Which language is this menu written in?", gold="Japanese",
         location="Tokyo, Japan", difficulty="Easy", hops=1, category="SimpleRecognition", domain="Translation",
         dynamism="Static", glasses="RayBan Meta", log=[],
         direct={"reasoning": "The script is kana and kanji.", "answer": "Japanese."}),
    dict(id="t09", image="plant.png", question="What is the name of this plant?", gold="Monstera deliciosa",
         difficulty="Medium", hops=1, category="SimpleRecognition", domain="Plant", dynamism="Static",
         glasses="Xiao Mi",
         log=[("What is this plant?", "ImageSearch", None, "https://en.wikipedia.org/wiki/Monstera_deliciosa")],
         direct="I have no knowledge about the species of this plant.",
         plan={"objects": ["potted plant"], "queries": []},
         detect={"potted plant": [[250, 330, 470, 670, 0.88]]},
         image_hits={"potted plant": [wiki_hit("https://en.wikipedia.org/wiki/Monstera_deliciosa"),
                                      hit("https://www.gardening.example/houseplants", "Houseplants", "")]},
         captions=["monstera", "leaves"],
         evidence="Monstera deliciosa",
         rag={"reasoning": "Image search matched the Monstera deliciosa article.",
              "answer": "It is a Monstera deliciosa, the Swiss cheese plant."}),
    dict(id="t10", image="phone.png", question="Which company makes this phone?", gold="Nokia",
         difficulty="Medium", hops=1, category="SimpleRecognition", domain="Shopping", dynamism="Static",
         glasses="RayBan Meta",
         log=[("Which phone is this?", "ImageSearch", None, "https://en.wikipedia.org/wiki/Nokia_3310")],
         direct="I have no knowledge about the maker of this phone.",
         plan={"objects": ["phone"], "queries": []},
         detect={"phone": []},
         image_hits={"": [wiki_hit("https://en.wikipedia.org/wiki/Nokia_3310")]},
         captions=["nokia", "phone"],
         evidence="made by the company Nokia",
         rag={"reasoning": "The handset is a Nokia 3310.", "answer": "Nokia makes this phone."}),
    dict(id="t11", image="paris.png", question="Which of these two landmarks is taller?", gold="Eiffel Tower",
         location="Paris, France", difficulty="Hard", hops=3, category="Comparison", domain="Culture",
         dynamism="Static", glasses="Xiao Mi",
         log=[("What is the tower?", "ImageSearch", None, "https://en.wikipedia.org/wiki/Eiffel_Tower"),
              ("What is the cathedral?", "ImageSearch", None, "https://en.wikipedia.org/wiki/Notre-Dame_de_Paris"),
              ("Which is taller?", "TextSearch", "Eiffel Tower height", "https://en.wikipedia.org/wiki/Eiffel_Tower")],
         direct="I have no knowledge about the heights of these landmarks.",
         plan={"objects": ["tower", "cathedral"], "queries": ["Eiffel Tower height", "Notre-Dame cathedral height"]},
         decouple={"Eiffel Tower height": ["Eiffel Tower height"],
                   "Notre-Dame cathedral height": ["Notre-Dame cathedral height"]},
         detect={"tower": [[120, 80, 100, 600, 0.8]], "cathedral": [[630, 300, 300, 350, 0.75]]},
         image_hits={"tower": [wiki_hit("https://en.wikipedia.org/wiki/Eiffel_Tower")],
                     "cathedral": [wiki_hit("https://en.wikipedia.org/wiki/Notre-Dame_de_Paris")]},
         text_hits={"Eiffel Tower height": [wiki_hit("https://en.wikipedia.org/wiki/Eiffel_Tower")],
                    "Notre-Dame cathedral height": [wiki_hit("https://en.wikipedia.org/wiki/Notre-Dame_de_Paris")]},
         captions=["eiffel", "tower", "cathedral", "paris"],
         evidence="330 metres tall",
         rag={"reasoning": "The tower is 330 m, the cathedral towers 69 m.",
              "answer": "The Eiffel Tower is taller."}),
    dict(id="t12", image="museum.png", question="When was this museum founded and who designed its building?",
         gold="1753", location="London", difficulty="Hard", hops=3, category="MultiHop", domain="Culture",
         dynamism="Static", glasses="RayBan Meta",
         log=[("Which museum is this?", "ImageSearch", None, "https://en.wikipedia.org/wiki/British_Museum"),
              ("When was it founded?", "TextSearch", "British Museum founded",
               "https://en.wikipedia.org/wiki/British_Museum"),
              ("Who designed it?", "TextSearch", "British Museum architect",
               "https://en.wikipedia.org/wiki/Robert_Smirke_(architect)")],
         direct="I have no knowledge about this museum.",
         plan={"objects": [], "queries": ["British Museum founded", "British Museum architect", "british museum founded",
                                          "British Museum building", "British Museum history", "British Museum London"]},
         decouple={"British Museum founded": ["British Museum founded"],
                   "British Museum architect": ["British Museum architect"],
                   "British Museum building": ["British Museum building"],
                   "British Museum history": ["British Museum founded"]},
         text_hits={"British Museum founded": [wiki_hit("https://en.wikipedia.org/wiki/British_Museum")],
                    "British Museum architect": [wiki_hit("https://en.wikipedia.org/wiki/Robert_Smirke_(architect)")],
                    "British Museum building": [wiki_hit("https://en.wikipedia.org/wiki/British_Museum")]},
         captions=["museum", "building"],
         evidence="founded in 1753",
         rag={"reasoning": "Founded 1753; building by Robert Smirke.",
              "answer": "It was founded in 1753 and its building was designed by Robert Smirke."}),
    dict(id="t13", image="tower_old.png", question="In which year was this clock tower completed?", gold="1889",
         difficulty="Hard", hops=2, category="TemporalUnderstanding", domain="Culture", dynamism="Static",
         glasses="Xiao Mi",
         log=[("Which clock tower is this?", "ImageSearch", None, None),
              ("When was it completed?", "TextSearch", "clock tower completion year", None)],
         direct="I have no knowledge about this clock tower.",
         plan={"objects": [], "queries": ["clock tower completed"]},
         decouple={"clock tower completed": ["clock tower completed"]},
         text_hits={"clock tower completed": [hit("https://www.history.example/clocktowers", "Clock towers", "")]},
         captions=["big", "ben"],
         vqa="I am not sure which year it was completed."),
    dict(id="t14", image="street.png", question="What is the speed limit on this street?", gold="30 km/h",
         location="Berlin", difficulty="Medium", hops=1, category="SpatialReasoning", domain="Navigation",
         dynamism="SlowChanging", glasses="RayBan Meta",
         log=[("What is the speed limit here?", "TextSearch", "Berlin residential street speed limit", None)],
         direct="I have no knowledge about the speed limit on this street.",
         plan={"objects": [], "queries": ["Berlin residential street speed limit"]},
         decouple={"Berlin residential street speed limit": ["Berlin residential street speed limit"]},
         vqa="The speed limit is probably 50 km/h."),
    dict(id="t15", image="clock.png", question="What time does the clock show?", gold="ten past two",
         difficulty="Easy", hops=1, category="SimpleRecognition", domain="", dynamism="FastChanging",
         glasses="Xiao Mi", log=[], no_domain_rule=True,
         direct={"reasoning": "Hour hand near two, minute hand on two.", "answer": "It shows ten past two."}),
    dict(id="t16", image="bus_hk.png", question="Which bus should I take from this stop to the airport?",
         gold="A11", location="Central, Hong Kong", difficulty="Medium", hops=2, category="Reasoning",
         domain="Navigation", dynamism="SlowChanging", glasses="RayBan Meta",
         log=[("Which stop is this?", "ImageSearch", None, None),
              ("Which bus goes to the airport?", "TextSearch", "Central to Hong Kong airport bus",
               "https://en.wikipedia.org/wiki/Citybus_route_A11")],
         direct="I have no knowledge about the airport buses from this stop.",
         plan={"objects": [], "queries": ["Central to Hong Kong airport bus"]},
         decouple={"Central to Hong Kong airport bus": ["Central to Hong Kong airport bus"]},
         text_hits={"Central to Hong Kong airport bus": [wiki_hit("https://en.wikipedia.org/wiki/Citybus_route_A11")]},
         captions=["citybus", "airport"],
         evidence="route A11",
         rag={"reasoning": "Citybus A11 runs from Central to the airport.", "answer": "Take the A11 bus."}),
    dict(id="t17", image="duck.png", question="What is the average lifespan of this bird?", gold="5 to 10 years",
         difficulty="Medium", hops=2, category="FactualKnowledge", domain="Animal", dynamism="Static",
         glasses="Xiao Mi",
         log=[("Which bird is this?", "ImageSearch", None, "https://en.wikipedia.org/wiki/Mallard"),
              ("What is its lifespan?", "TextSearch", "mallard average lifespan", "https://en.wikipedia.org/wiki/Mallard")],
         direct="I have no knowledge about the lifespan of this bird.",
         plan={"objects": ["bird"], "queries": ["average lifespan of this bird"]},
         decouple={"average lifespan of this bird": ["mallard average lifespan"]},
         detect={"bird": [[290, 580, 400, 300, 0.86]]},
         image_hits={"bird": [wiki_hit("https://en.wikipedia.org/wiki/Mallard")]},
         text_hits={"mallard average lifespan": [wiki_hit("https://en.wikipedia.org/wiki/Mallard")]},
         captions=["mallard", "duck"],
         evidence="5 to 10 years",
         rag={"reasoning": "Wild mallards live 5 to 10 years.", "answer": "About 5 to 10 years in the wild."}),
    dict(id="t18", image="station.png", question="What famous landmarks are near this station?",
         gold="Hachiko statue", location="Tokyo", difficulty="Medium", hops=2, category="Aggregation",
         domain="Navigation", dynamism="Static", glasses="RayBan Meta",
         log=[("Which station is this?", "ImageSearch", None, "https://en.wikipedia.org/wiki/Shibuya_Station"),
              ("Which landmarks are nearby?", "TextSearch", "landmarks near Shibuya station",
               "https://en.wikipedia.org/wiki/Shibuya_Station")],
         direct="I have no knowledge about this station.",
         plan={"objects": [], "queries": ["landmarks near Shibuya station"]},
         decouple={"landmarks near Shibuya station": ["landmarks near Shibuya station"]},
         text_hits={"landmarks near Shibuya station": [
             wiki_hit("https://en.wikipedia.org/wiki/Shibuya_Station"),
             wiki_hit("https://en.wikipedia.org/wiki/Hachik%C5%8D"),
             wiki_hit("https://en.wikipedia.org/wiki/Shibuya_Crossing"),
             hit("https://www.tokyo.example/shibuya-guide", "Shibuya guide", ""),
             hit("https://www.tokyo.example/shibuya-sky", "Shibuya Sky", ""),
             hit("https://www.tokyo.example/shibuya-109", "Shibuya 109", ""),
             hit("https://www.tokyo.example/miyashita-park", "Miyashita Park", ""),
             hit("https://www.tokyo.example/center-gai", "Center Gai", "")]},
         captions=["shibuya", "station"],
         evidence="Hachiko statue",
         rag={"reasoning": "Shibuya Station neighbours the Hachiko statue and the scramble crossing.",
              "answer": "The Hachiko statue and the Shibuya Scramble Crossing."}),
    dict(id="t19", image="whiteboard.png", question="What formula is written on the whiteboard?", gold="E = mc^2",
         difficulty="Easy", hops=1, category="SimpleRecognition", domain="Education", dynamism="Static",
         glasses="Xiao Mi", log=[],
         direct={"reasoning": "The board shows the mass-energy equivalence.", "answer": "E = mc^2."}),
    dict(id="t20", image="mushroom.png", question="Is this mushroom edible?", gold="No",
         difficulty="Medium", hops=2, category="FactualKnowledge", domain="Plant", dynamism="Static",
         glasses="RayBan Meta",
         log=[("Which mushroom is this?", "ImageSearch", None, "https://en.wikipedia.org/wiki/Amanita_muscaria"),
              ("Is it edible?", "TextSearch", "is fly agaric edible", "https://en.wikipedia.org/wiki/Amanita_muscaria")],
         direct="I have no knowledge about whether this mushroom is edible.",
         plan={"objects": ["mushroom"], "queries": ["is fly agaric edible"]},
         decouple={"is fly agaric edible": ["is fly agaric edible"]},
         detect={"mushroom": [[170, 90, 170, 120, 0.93]]},
         image_hits={"mushroom": [wiki_hit("https://en.wikipedia.org/wiki/Amanita_muscaria")]},
         text_hits={"is fly agaric edible": [wiki_hit("https://en.wikipedia.org/wiki/Amanita_muscaria")]},
         captions=["mushroom", "amanita"],
         evidence="not edible",
         rag={"reasoning": "Fly agaric is poisonous.", "answer": "No, the fly agaric is poisonous and not edible."}),
]

EXTRA_TEXT_SEARCH = {
    "quota probe": {"error": "quota"},
    "outage probe": {"error": "unavailable"},
    "broken links probe": [hit(url, "broken", "") for url in FAILURE_PAGES],
}


def draw_images():
    (OUT / "images").mkdir(parents=True, exist_ok=True)
    for name, (size, bg, shapes) in IMAGES.items():
        img = Image.new("RGB", size, bg)
        d = ImageDraw.Draw(img)
        for kind, box, color in shapes:
            (d.rectangle if kind == "rect" else d.ellipse)(box, fill=color)
        path = OUT / "images" / name
        if name.endswith(".jpg"):
            img.save(path, quality=90)
        else:
            img.save(path, optimize=True)


def image_ref(name, crop=None):
    ref = {"file": f"images/{name}", "resize": 1024}
    if crop:
        ref["crop"] = crop
    return ref


def dump(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def main():
    draw_images()

    dataset, rules, detections, captions = [], [], [], []
    text_search, image_search = dict(EXTRA_TEXT_SEARCH), []
    for t in TASKS:
        q = t["question"]
        rec = {"id": t["id"], "image": f"images/{t['image']}", "question": q}
        if "location" in t:
            rec["location"] = t["location"]
        rec.update(gold_answer=t["gold"], difficulty=t["difficulty"], hops=t["hops"], category=t["category"],
                   domain_label=t["domain"], dynamism=t["dynamism"], glasses=t["glasses"])
        log = []
        for sub, tool, kw, url in t["log"]:
            h = {"sub_question": sub, "tool": tool}
            if kw:
                h["search_keywords"] = kw
            if url:
                h["url"] = url
            log.append(h)
        rec["search_log"] = log
        dataset.append(rec)

        if not t.get("no_domain_rule"):
            rules.append({"purpose": "domain_route", "contains": q, "response": {"domain": t["domain"] or "Other"}})
        rules.append({"purpose": "direct_answer", "contains": q, "response": t["direct"]})
        if "plan" in t:
            rules.append({"purpose": "search_route", "contains": q, "response": t["plan"]})
        for query, subs in t.get("decouple", {}).items():
            rules.append({"purpose": "query_decouple", "contains": f"Query: {query}", "response": {"sub_queries": subs}})
        if "rag" in t:
            rules.append({"purpose": "rag_answer", "contains": [q, t["evidence"]], "response": t["rag"]})
            rules.append({"purpose": "rag_answer", "contains": q,
                          "response": {"reasoning": "The evidence does not settle it.", "answer": "I could not find out."}})
        rules.append({"purpose": "vqa", "contains": q, "response": t.get("vqa", "I am not sure.")})

        size = resized_size(IMAGES[t["image"]][0])
        for label, boxes in t.get("detect", {}).items():
            detections.append({"image": image_ref(t["image"]), "label": label,
                               "boxes": [{"x": b[0], "y": b[1], "w": b[2], "h": b[3], "confidence": b[4]} for b in boxes]})
        for label, hits in t.get("image_hits", {}).items():
            crop = None
            if label:
                b = t["detect"][label][0]
                assert b[0] + b[2] <= size[0] and b[1] + b[3] <= size[1], (t["id"], label)
                crop = b[:4]
            image_search.append({"image": image_ref(t["image"], crop), "hits": hits})
        for query, hits in t.get("text_hits", {}).items():
            text_search[query] = hits
        if "captions" in t:
            captions.append({"image": image_ref(t["image"]), "keywords": t["captions"]})

    (OUT / "dataset.jsonl").write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in dataset))
    dump("chat.json", {"by_digest": {}, "rules": rules})
    dump("search.json", {"text": text_search, "image": image_search})
    dump("detections.json", detections)
    dump("captions.json", captions)

    (OUT / "pages").mkdir(exist_ok=True)
    pages = {}
    for i, (url, html) in enumerate(sorted(PAGES.items())):
        name = f"pages/p{i:02d}.html"
        (OUT / name).write_text(html)
        pages[url] = {"file": name}
    pages.update(FAILURE_PAGES)
    dump("pages.json", pages)


if __name__ == "__main__":
    main()
